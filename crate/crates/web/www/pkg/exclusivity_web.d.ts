/* tslint:disable */
/* eslint-disable */

/**
 * Merge map `W_index` (1..=16): the assignment `u_i -> v_σ(i)`, its global
 * events, and the edges of both event graphs for drawing.
 */
export function merge_map(index: number): string;

/**
 * Exact `S`, `R` and `S·R` for `points` evenly spaced visibilities in `[0, 1]`.
 */
export function noise_sweep(points: number): string;

/**
 * Simulates both experiments. `shots = 0` gives exact noisy probabilities.
 */
export function simulate(seed: number, shots: number, v_chsh: number, v_nc: number): string;

export type InitInput = RequestInfo | URL | Response | BufferSource | WebAssembly.Module;

export interface InitOutput {
    readonly memory: WebAssembly.Memory;
    readonly merge_map: (a: number) => [number, number, number, number];
    readonly noise_sweep: (a: number) => [number, number, number, number];
    readonly simulate: (a: number, b: number, c: number, d: number) => [number, number, number, number];
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
