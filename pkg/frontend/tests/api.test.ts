import { mkdtempSync, writeFileSync } from 'node:fs';
import { tmpdir } from 'node:os';
import { join } from 'node:path';
import { beforeAll, describe, expect, it } from 'vitest';

import {
    calibrationLoad,
    CliRuntimeError,
    CliUsageError,
    gen,
    measure,
    runCli,
    type MmdRecord,
    type NcdRecord,
    type OrderRecord,
} from '../src/index';

let dir: string;
let seriesA: string;
let seriesB: string;
let calibFile: string;

beforeAll(() => {
    dir = mkdtempSync(join(tmpdir(), 'driftscan-api-'));
    seriesA = gen({ kind: 'average', out: join(dir, 'a.csv'), blocks: 3, blockLen: 80, seed: 1 });
    seriesB = gen({ kind: 'average', out: join(dir, 'b.csv'), blocks: 3, blockLen: 80, seed: 9 });
    calibFile = join(dir, 'tables.json');
    runCli(['calibrate', calibFile, '--measures', 'ks,hellinger',
            '--window-sizes', '30,60', '--reps', '100']);
}, 120000);

describe('measure', () => {
    it('ncd returns one record with a bounded p-value', () => {
        const result = measure('ncd', seriesA, seriesB, { seed: 2 });
        expect(result.records).toHaveLength(1);
        const record = result.records[0] as NcdRecord;
        expect(record.p_value).toBeGreaterThanOrEqual(0);
        expect(record.p_value).toBeLessThanOrEqual(1);
        expect(typeof record.reject).toBe('boolean');
    });

    it('mmd honors the estimator choice', () => {
        const result = measure('mmd', seriesA, seriesB, { estimator: 'linear' });
        const record = result.records[0] as MmdRecord;
        expect(record.estimator).toBe('linear');
        expect(record.sigma_sq).toBeGreaterThan(0);
    });

    it('order partitions account for every point', () => {
        const result = measure('order', seriesA, seriesA, { method: 'mst' });
        const records = result.records as OrderRecord[];
        const total = records.reduce((acc, r) => acc + r.count_r, 0);
        expect(total).toBe(240);
        expect(records[records.length - 1].cum_r).toBe(1);
    });
});

describe('calibrationLoad', () => {
    it('round-trips a calibrate output file', () => {
        const file = calibrationLoad(calibFile);
        expect(file.tables.map((t) => t.measure).sort()).toEqual(['hellinger', 'ks']);
        for (const table of file.tables) {
            expect(table.grid.length).toBeGreaterThanOrEqual(2);
            expect(table.grid[table.grid.length - 1].cum).toBeCloseTo(1, 6);
        }
    });

    it('rejects a structurally invalid file', () => {
        const bad = join(dir, 'bad.json');
        writeFileSync(bad, JSON.stringify({ version: 1, tables: [] }));
        expect(() => calibrationLoad(bad)).toThrow();
    });

    it('rejects a missing file', () => {
        expect(() => calibrationLoad(join(dir, 'absent.json'))).toThrow(CliRuntimeError);
    });
});

describe('error mapping', () => {
    it('usage errors surface as CliUsageError', () => {
        expect(() => runCli(['scan', '--input', seriesA, '--ref-len', '10',
                             '--method', 'nope'])).toThrow(CliUsageError);
    });

    it('runtime errors surface as CliRuntimeError', () => {
        expect(() => runCli(['scan', '--input', join(dir, 'absent.csv'),
                             '--ref-len', '10', '--calib', calibFile,
                             '--measures', 'ks,hellinger'])).toThrow(CliRuntimeError);
    });
});
