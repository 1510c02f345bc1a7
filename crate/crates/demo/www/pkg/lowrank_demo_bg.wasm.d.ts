/* tslint:disable */
/* eslint-disable */
export const memory: WebAssembly.Memory;
export const compareSvt: (a: number, b: number, c: number, d: number) => [number, number];
export const inertialSweep: (a: number, b: number, c: number) => [number, number];
export const rankTraces: (a: number, b: number, c: number, d: number) => [number, number];
export const version: () => [number, number];
export const __externref_table_alloc: () => number;
export const __wbindgen_externrefs: WebAssembly.Table;
export const __wbindgen_free: (a: number, b: number, c: number) => void;
export const __wbindgen_start: () => void;
