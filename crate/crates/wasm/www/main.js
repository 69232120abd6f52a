import init, { jsa_image, hom_curve, visibility_scan, optimal_magnification } from "./pkg/timelens_wasm.js";

const $ = (id) => document.getElementById(id);
const COLORS = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd"];

function read() {
  const v = {
    length: +$("length").value,
    bandwidth: +$("bandwidth").value,
    d: Math.pow(10, +$("d").value),
    m: +$("m").value,
    dt: +$("dt").value,
  };
  $("length-v").textContent = v.length.toFixed(0);
  $("bandwidth-v").textContent = v.bandwidth.toFixed(2);
  $("d-v").textContent = v.d.toPrecision(3);
  $("m-v").textContent = v.m.toFixed(2);
  $("dt-v").textContent = v.dt.toFixed(2);
  return v;
}

function drawJsa(v) {
  const c = $("jsa");
  const ctx = c.getContext("2d");
  const img = jsa_image(v.length, v.bandwidth, 161);
  const n = img.size();
  const vals = img.values();
  const data = ctx.createImageData(n, n);
  // rows follow Omega (x axis); flip so Omega' increases upward
  for (let i = 0; i < n; i++) {
    for (let j = 0; j < n; j++) {
      const a = vals[i * n + j];
      const p = ((n - 1 - j) * n + i) * 4;
      data.data[p] = 255 * (1 - a * 0.85);
      data.data[p + 1] = 255 * (1 - a * 0.6);
      data.data[p + 2] = 255;
      data.data[p + 3] = 255;
    }
  }
  const off = new OffscreenCanvas(n, n);
  off.getContext("2d").putImageData(data, 0, 0);
  ctx.imageSmoothingEnabled = false;
  ctx.clearRect(0, 0, c.width, c.height);
  ctx.drawImage(off, 0, 0, c.width, c.height);
  ctx.fillStyle = "#333";
  ctx.fillText(`±${img.half_width().toFixed(2)} rad/ps on both axes`, 6, c.height - 6);
  img.free();
}

function plot(canvas, xs, series, yRange, xLabel) {
  const ctx = canvas.getContext("2d");
  const W = canvas.width, H = canvas.height, pad = 34;
  ctx.clearRect(0, 0, W, H);
  const [x0, x1] = [xs[0], xs[xs.length - 1]];
  const [y0, y1] = yRange;
  const X = (x) => pad + (W - 2 * pad) * (x - x0) / (x1 - x0);
  const Y = (y) => H - pad - (H - 2 * pad) * (y - y0) / (y1 - y0);
  ctx.strokeStyle = "#999";
  ctx.strokeRect(pad, pad, W - 2 * pad, H - 2 * pad);
  ctx.fillStyle = "#333";
  ctx.fillText(x0.toFixed(1), pad, H - pad + 14);
  ctx.fillText(x1.toFixed(1), W - pad - 16, H - pad + 14);
  ctx.fillText(xLabel, W / 2 - 20, H - 6);
  ctx.fillText(y1.toFixed(1), 4, pad + 4);
  ctx.fillText(y0.toFixed(1), 4, H - pad);
  series.forEach(([name, ys], k) => {
    ctx.strokeStyle = COLORS[k % COLORS.length];
    ctx.beginPath();
    ys.forEach((y, i) => (i ? ctx.lineTo(X(xs[i]), Y(y)) : ctx.moveTo(X(xs[i]), Y(y))));
    ctx.stroke();
    ctx.fillStyle = ctx.strokeStyle;
    ctx.fillText(name, W - pad - 90, pad + 14 + 13 * k);
  });
}

function drawHom(v) {
  const h = hom_curve(v.length, v.bandwidth, v.d, v.m, v.dt, 6.0, 301);
  plot($("hom"), h.delays(), [["lens", h.lens()], ["lensless", h.lensless()], ["cw", h.cw()]], [0, 1.05], "δτ (ps)");
  $("vis").textContent = `V = ${h.visibility().toFixed(4)}`;
  h.free();
}

function drawScan(v) {
  const n = 151, lo = 0.5, hi = 5.0;
  const ms = Array.from({ length: n }, (_, k) => lo + (hi - lo) * k / (n - 1));
  const series = [0.5, 1.23, 10, v.d].map((d) => [`D = ${d.toPrecision(3)}`, visibility_scan(v.length, v.bandwidth, d, lo, hi, n)]);
  plot($("scan"), ms, series, [0, 1.05], "|M|");
  $("mopt").textContent = `|M_opt| = ${optimal_magnification(v.length, v.bandwidth).toFixed(3)}`;
}

function redraw() {
  const v = read();
  try {
    drawJsa(v);
    drawHom(v);
    drawScan(v);
    $("error").textContent = "";
  } catch (e) {
    $("error").textContent = String(e);
  }
}

await init();
for (const id of ["length", "bandwidth", "d", "m", "dt"]) $(id).addEventListener("input", redraw);
redraw();
