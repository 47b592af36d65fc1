import { z } from 'zod';

export const ScanRecordSchema = z.object({
    window_start: z.number().int(),
    method: z.string(),
    raw: z.number().nullable(),
    normalized: z.number().nullable(),
    p_value: z.number().min(0).max(1).nullable(),
    verdict: z.enum(['same', 'different']),
});
export type ScanRecord = z.infer<typeof ScanRecordSchema>;

export const PayloadSchema = z.object({
    manifest_digest: z.string().regex(/^[0-9a-f]{64}$/),
    records: z.array(z.record(z.unknown())),
});
export type Payload = z.infer<typeof PayloadSchema>;

export const NcdRecordSchema = z.object({
    ncd: z.number(),
    p_value: z.number().min(0).max(1),
    reject: z.boolean(),
    bootstrap_runs: z.number().int(),
});
export type NcdRecord = z.infer<typeof NcdRecordSchema>;

export const MmdRecordSchema = z.object({
    estimator: z.enum(['quadratic', 'linear']),
    value: z.number(),
    p_value: z.number().min(0).max(1),
    reject: z.boolean(),
    sigma_sq: z.number().positive(),
});
export type MmdRecord = z.infer<typeof MmdRecordSchema>;

export const OrderRecordSchema = z.object({
    position: z.number().int().positive(),
    count_r: z.number().int().min(0),
    count_w: z.number().int().min(0),
    cum_r: z.number().min(0).max(1),
    cum_w: z.number().min(0).max(1),
});
export type OrderRecord = z.infer<typeof OrderRecordSchema>;

export const CalibrationGridPointSchema = z.object({
    x: z.number(),
    cum: z.number().min(0).max(1),
    sigma: z.number().min(0),
});

export const CalibrationTableSchema = z.object({
    version: z.literal(1),
    measure: z.string(),
    grid: z.array(CalibrationGridPointSchema).min(2),
    provenance: z.record(z.unknown()).default({}),
});
export type CalibrationTable = z.infer<typeof CalibrationTableSchema>;

export const CalibrationFileSchema = z.object({
    version: z.literal(1),
    tables: z.array(CalibrationTableSchema).min(1),
});
export type CalibrationFile = z.infer<typeof CalibrationFileSchema>;
