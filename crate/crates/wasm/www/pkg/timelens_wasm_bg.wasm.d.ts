/* tslint:disable */
/* eslint-disable */
export const memory: WebAssembly.Memory;
export const __wbg_homdata_free: (a: number, b: number) => void;
export const __wbg_jsaimage_free: (a: number, b: number) => void;
export const hom_curve: (a: number, b: number, c: number, d: number, e: number, f: number, g: number) => [number, number, number];
export const homdata_cw: (a: number) => [number, number];
export const homdata_delays: (a: number) => [number, number];
export const homdata_lens: (a: number) => [number, number];
export const homdata_lensless: (a: number) => [number, number];
export const homdata_visibility: (a: number) => number;
export const jsa_image: (a: number, b: number, c: number) => [number, number, number];
export const jsaimage_half_width: (a: number) => number;
export const jsaimage_size: (a: number) => number;
export const jsaimage_values: (a: number) => [number, number];
export const optimal_magnification: (a: number, b: number) => [number, number, number];
export const visibility_scan: (a: number, b: number, c: number, d: number, e: number, f: number) => [number, number, number, number];
export const __wbindgen_externrefs: WebAssembly.Table;
export const __externref_table_dealloc: (a: number) => void;
export const __wbindgen_free: (a: number, b: number, c: number) => void;
export const __wbindgen_start: () => void;
