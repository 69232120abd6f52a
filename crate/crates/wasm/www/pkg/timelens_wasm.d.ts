/* tslint:disable */
/* eslint-disable */

/**
 * Normalized coincidence rate 1 − p_int over δτ ∈ [−span, span] ps, with
 * the lensless and CW references.
 */
export class HomData {
    private constructor();
    free(): void;
    [Symbol.dispose](): void;
    cw(): Float64Array;
    delays(): Float64Array;
    lens(): Float64Array;
    lensless(): Float64Array;
    visibility(): number;
}

/**
 * |J| on an n×n grid, normalized to 1, row-major with Ω along rows.
 */
export class JsaImage {
    private constructor();
    free(): void;
    [Symbol.dispose](): void;
    /**
     * Half-width of both frequency axes, rad/ps.
     */
    half_width(): number;
    size(): number;
    values(): Float32Array;
}

export function hom_curve(length_mm: number, bandwidth_nm: number, d: number, m: number, delta_t: number, span: number, points: number): HomData;

export function jsa_image(length_mm: number, bandwidth_nm: number, size: number): JsaImage;

/**
 * |M_opt| for the given source.
 */
export function optimal_magnification(length_mm: number, bandwidth_nm: number): number;

export function visibility_scan(length_mm: number, bandwidth_nm: number, d: number, m_min: number, m_max: number, points: number): Float64Array;

export type InitInput = RequestInfo | URL | Response | BufferSource | WebAssembly.Module;

export interface InitOutput {
    readonly memory: WebAssembly.Memory;
    readonly __wbg_homdata_free: (a: number, b: number) => void;
    readonly __wbg_jsaimage_free: (a: number, b: number) => void;
    readonly hom_curve: (a: number, b: number, c: number, d: number, e: number, f: number, g: number) => [number, number, number];
    readonly homdata_cw: (a: number) => [number, number];
    readonly homdata_delays: (a: number) => [number, number];
    readonly homdata_lens: (a: number) => [number, number];
    readonly homdata_lensless: (a: number) => [number, number];
    readonly homdata_visibility: (a: number) => number;
    readonly jsa_image: (a: number, b: number, c: number) => [number, number, number];
    readonly jsaimage_half_width: (a: number) => number;
    readonly jsaimage_size: (a: number) => number;
    readonly jsaimage_values: (a: number) => [number, number];
    readonly optimal_magnification: (a: number, b: number) => [number, number, number];
    readonly visibility_scan: (a: number, b: number, c: number, d: number, e: number, f: number) => [number, number, number, number];
    readonly __wbindgen_externrefs: WebAssembly.Table;
    readonly __externref_table_dealloc: (a: number) => void;
    readonly __wbindgen_free: (a: number, b: number, c: number) => void;
    readonly __wbindgen_start: () => void;
}

export type SyncInitInput = BufferSource | WebAssembly.Module;

/**
 * Instantiates the given `module`, which can either be bytes or
 * a precompiled `WebAssembly.Module`.
 *
 * @param {{ module: SyncInitInput }} module - Passing `SyncInitInput` directly is deprecated.
 *
 * @returns {InitOutput}
 */
export function initSync(module: { module: SyncInitInput } | SyncInitInput): InitOutput;

/**
 * If `module_or_path` is {RequestInfo} or {URL}, makes a request and
 * for everything else, calls `WebAssembly.instantiate` directly.
 *
 * @param {{ module_or_path: InitInput | Promise<InitInput> }} module_or_path - Passing `InitInput` directly is deprecated.
 *
 * @returns {Promise<InitOutput>}
 */
export default function __wbg_init (module_or_path?: { module_or_path: InitInput | Promise<InitInput> } | InitInput | Promise<InitInput>): Promise<InitOutput>;
