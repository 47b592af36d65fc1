import { readFileSync } from 'node:fs';

import { runCli, runJson, CliRuntimeError, CliUsageError } from './runner';
import {
    CalibrationFile,
    CalibrationFileSchema,
    MmdRecord,
    MmdRecordSchema,
    NcdRecord,
    NcdRecordSchema,
    OrderRecord,
    OrderRecordSchema,
    Payload,
    PayloadSchema,
    ScanRecord,
    ScanRecordSchema,
} from './types';

export { runCli, runJson, CliRuntimeError, CliUsageError };
export * from './types';

export type ScanMethod = 'poset' | 'mst' | 'ncd' | 'mmd_u2' | 'mmd_l2' | 'martingale';

export interface ScanOptions {
    input: string;
    refLen: number;
    refStart?: number;
    step?: number;
    method?: ScanMethod;
    measures?: string[];
    disagreement?: number;
    alpha?: number;
    calib?: string;
    seed?: number;
}

export interface ScanResult {
    manifestDigest: string;
    records: ScanRecord[];
}

function payload(raw: unknown): Payload {
    return PayloadSchema.parse(raw);
}

/** Compare successive windows of a series against its reference window. */
export function scan(options: ScanOptions): ScanResult {
    const args = ['scan', '--input', options.input, '--ref-len', String(options.refLen)];
    if (options.refStart !== undefined) args.push('--ref-start', String(options.refStart));
    if (options.step !== undefined) args.push('--step', String(options.step));
    if (options.method !== undefined) args.push('--method', options.method);
    if (options.measures !== undefined) args.push('--measures', options.measures.join(','));
    if (options.disagreement !== undefined) args.push('--disagreement', String(options.disagreement));
    if (options.alpha !== undefined) args.push('--alpha', String(options.alpha));
    if (options.calib !== undefined) args.push('--calib', options.calib);
    if (options.seed !== undefined) args.push('--seed', String(options.seed));
    const data = payload(runJson(args));
    return {
        manifestDigest: data.manifest_digest,
        records: data.records.map((r) => ScanRecordSchema.parse(r)),
    };
}

export type MeasureKind = 'ncd' | 'mmd' | 'order';

export interface MeasureOptions {
    estimator?: 'quadratic' | 'linear';
    method?: 'poset' | 'mst';
    alpha?: number;
    seed?: number;
}

export interface MeasureResult {
    manifestDigest: string;
    records: (NcdRecord | MmdRecord | OrderRecord)[];
}

/** One-shot comparison of two whole series files. */
export function measure(kind: MeasureKind, inputA: string, inputB: string,
                        options: MeasureOptions = {}): MeasureResult {
    const args = [kind, '--input-a', inputA, '--input-b', inputB];
    if (options.estimator !== undefined) args.push('--estimator', options.estimator);
    if (options.method !== undefined) args.push('--method', options.method);
    if (options.alpha !== undefined) args.push('--alpha', String(options.alpha));
    if (options.seed !== undefined) args.push('--seed', String(options.seed));
    const data = payload(runJson(args));
    const schema = kind === 'ncd' ? NcdRecordSchema : kind === 'mmd' ? MmdRecordSchema : OrderRecordSchema;
    return {
        manifestDigest: data.manifest_digest,
        records: data.records.map((r) => schema.parse(r)),
    };
}

/** Read and validate a calibration table file produced by `driftscan calibrate`. */
export function calibrationLoad(path: string): CalibrationFile {
    let text: string;
    try {
        text = readFileSync(path, 'utf-8');
    } catch (err) {
        throw new CliRuntimeError(`cannot read calibration file: ${(err as Error).message}`);
    }
    let parsed: unknown;
    try {
        parsed = JSON.parse(text);
    } catch (err) {
        throw new CliRuntimeError(`calibration file is not JSON: ${(err as Error).message}`);
    }
    const file = CalibrationFileSchema.parse(parsed);
    for (const table of file.tables) {
        for (let i = 1; i < table.grid.length; i += 1) {
            if (table.grid[i].x <= table.grid[i - 1].x) {
                throw new CliRuntimeError(`table ${table.measure}: grid x must strictly increase`);
            }
            if (table.grid[i].cum < table.grid[i - 1].cum) {
                throw new CliRuntimeError(`table ${table.measure}: grid cum must be non-decreasing`);
            }
        }
    }
    return file;
}

export interface GenOptions {
    kind: 'average' | 'variance' | 'mixture' | 'unibench';
    out: string;
    blocks?: number;
    blockLen?: number;
    dims?: number;
    seed?: number;
}

/** Generate a benchmark series CSV on disk, returning the output path. */
export function gen(options: GenOptions): string {
    const args = ['gen', '--kind', options.kind, '--out', options.out];
    if (options.blocks !== undefined) args.push('--blocks', String(options.blocks));
    if (options.blockLen !== undefined) args.push('--block-len', String(options.blockLen));
    if (options.dims !== undefined) args.push('--dims', String(options.dims));
    if (options.seed !== undefined) args.push('--seed', String(options.seed));
    runCli(args);
    return options.out;
}

/** Key-sorted JSON text, used to compare payloads structurally. */
export function canonicalJson(value: unknown): string {
    if (Array.isArray(value)) {
        return `[${value.map(canonicalJson).join(',')}]`;
    }
    if (value !== null && typeof value === 'object') {
        const entries = Object.entries(value as Record<string, unknown>)
            .sort(([a], [b]) => (a < b ? -1 : a > b ? 1 : 0))
            .map(([k, v]) => `${JSON.stringify(k)}:${canonicalJson(v)}`);
        return `{${entries.join(',')}}`;
    }
    return JSON.stringify(value);
}
