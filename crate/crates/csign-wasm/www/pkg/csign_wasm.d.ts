/* tslint:disable */
/* eslint-disable */

/**
 * Flat rows of (q, dB, g_opt, F_worst) for the NSS_d-loaded CSIGN gate.
 */
export function csign_curve(d: number, q_lo: number, q_hi: number, points: number): Float64Array;

/**
 * Flat rows of (sources, success probability, stderr) for one DV route.
 */
export function res_state_curve(route: string, trials: number, seed: number, max_sources: number, points: number): Float64Array;

/**
 * Flat rows of (B, P, F, Q) for teleporting |n⟩ with acceptance radius B.
 */
export function teleport_tradeoff(n: number, q: number, g: number, b_max: number, points: number): Float64Array;

export type InitInput = RequestInfo | URL | Response | BufferSource | WebAssembly.Module;

export interface InitOutput {
    readonly memory: WebAssembly.Memory;
    readonly csign_curve: (a: number, b: number, c: number, d: number) => [number, number, number, number];
    readonly res_state_curve: (a: number, b: number, c: number, d: number, e: number, f: number) => [number, number, number, number];
    readonly teleport_tradeoff: (a: number, b: number, c: number, d: number, e: number) => [number, number, number, number];
    readonly __wbindgen_externrefs: WebAssembly.Table;
    readonly __externref_table_dealloc: (a: number) => void;
    readonly __wbindgen_free: (a: number, b: number, c: number) => void;
    readonly __wbindgen_malloc: (a: number, b: number) => number;
    readonly __wbindgen_realloc: (a: number, b: number, c: number, d: number) => number;
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
