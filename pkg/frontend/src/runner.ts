import { spawnSync } from 'node:child_process';

const CLI = process.env.DRIFTSCAN_BIN ?? 'driftscan';

export class CliUsageError extends Error {}
export class CliRuntimeError extends Error {}

export interface RunResult {
    stdout: string;
    stderr: string;
}

/** Invoke the driftscan executable and map its exit codes onto errors. */
export function runCli(args: string[]): RunResult {
    const proc = spawnSync(CLI, args, { encoding: 'utf-8', maxBuffer: 256 * 1024 * 1024 });
    if (proc.error) {
        throw new CliRuntimeError(`failed to launch ${CLI}: ${proc.error.message}`);
    }
    if (proc.status === 2) {
        throw new CliUsageError(proc.stderr.trim() || `usage error: driftscan ${args.join(' ')}`);
    }
    if (proc.status !== 0) {
        throw new CliRuntimeError(proc.stderr.trim() || `driftscan exited with ${proc.status}`);
    }
    return { stdout: proc.stdout, stderr: proc.stderr };
}

/** Run a subcommand with --format json and parse the payload. */
export function runJson(args: string[]): unknown {
    const { stdout } = runCli([...args, '--format', 'json']);
    try {
        return JSON.parse(stdout);
    } catch (err) {
        throw new CliRuntimeError(`driftscan emitted invalid JSON: ${(err as Error).message}`);
    }
}
