//! Plot script stubs written next to the CSV data. They need numpy and
//! matplotlib at plot time only.

pub const JSA: &str = r#"import numpy as np
import matplotlib.pyplot as plt

d = np.loadtxt("jsa.csv", delimiter=",", skiprows=1)
w, wp = np.unique(d[:, 0]), np.unique(d[:, 1])
amp = np.hypot(d[:, 2], d[:, 3]).reshape(len(w), len(wp))
plt.pcolormesh(w, wp, amp.T / amp.max(), shading="auto")
plt.xlabel("Omega (rad/ps)")
plt.ylabel("Omega' (rad/ps)")
plt.colorbar(label="|J| (normalized)")
plt.savefig("jsa.png", dpi=150)
"#;

pub const VISIBILITY: &str = r#"import numpy as np
import matplotlib.pyplot as plt

d = np.loadtxt("visibility_scan.csv", delimiter=",", skiprows=1)
for big_d in np.unique(d[:, 0]):
    r = d[d[:, 0] == big_d]
    plt.plot(r[:, 1], r[:, 2], label=f"D = {big_d:g}")
plt.xlabel("|M|")
plt.ylabel("visibility")
plt.legend()
plt.savefig("visibility_scan.png", dpi=150)
"#;

pub const HOM: &str = r#"import csv
import matplotlib.pyplot as plt

curves = {}
with open("hom_curves.csv") as f:
    for row in csv.DictReader(f):
        x, y = curves.setdefault(row["curve"], ([], []))
        x.append(float(row["delta_tau_ps"]))
        y.append(float(row["normalized_rate"]))
for name, (x, y) in curves.items():
    plt.plot(x, y, label=name)
plt.xlabel("delta tau (ps)")
plt.ylabel("normalized coincidence rate")
plt.legend()
plt.savefig("hom_curves.png", dpi=150)
"#;

pub const SURFACE: &str = r#"import numpy as np
import matplotlib.pyplot as plt

d = np.loadtxt("hom_surface.csv", delimiter=",", skiprows=1)
dt, dtau = np.unique(d[:, 0]), np.unique(d[:, 1])
rate = d[:, 3].reshape(len(dt), len(dtau))
plt.pcolormesh(dtau, dt, rate, shading="auto")
plt.xlabel("delta tau (ps)")
plt.ylabel("delta t (ps)")
plt.colorbar(label="normalized coincidence rate")
plt.savefig("hom_surface.png", dpi=150)
"#;
