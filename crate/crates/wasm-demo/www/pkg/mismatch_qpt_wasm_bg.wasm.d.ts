/* tslint:disable */
/* eslint-disable */
export const memory: WebAssembly.Memory;
export const fidelityCurve: (a: number, b: number, c: number) => [number, number, number, number];
export const gateSummary: (a: number, b: number) => [number, number, number, number];
export const homCoincidence: (a: number) => [number, number, number];
export const matrixDim: () => number;
export const tauCount: () => number;
export const __wbindgen_externrefs: WebAssembly.Table;
export const __wbindgen_malloc: (a: number, b: number) => number;
export const __externref_table_dealloc: (a: number) => void;
export const __wbindgen_free: (a: number, b: number, c: number) => void;
export const __wbindgen_start: () => void;
