/**
 * Reference-trajectory formulas for the built-in tracking tasks.
 *
 * Intentionally duplicated from the simulator (the CSV logs carry only the
 * flown states); keep in sync with the task registry there.
 */

export type Vec3 = [number, number, number];

export interface TaskRef {
  name: string;
  xRef(t: number): Vec3;
}

const helix: TaskRef = {
  name: "helix",
  xRef: (t) => [t / 20, Math.sin(t / 6), 2 * Math.cos(t / 6)],
};

const torus: TaskRef = {
  name: "torus",
  xRef: (t) => [
    Math.sin(0.1 * t) + 2 * Math.sin(0.2 * t),
    Math.cos(0.1 * t) - 2 * Math.cos(0.2 * t),
    -Math.sin(0.3 * t),
  ],
};

const hover: TaskRef = {
  name: "hover",
  xRef: () => [1, 1.3, 2],
};

export const TASKS: Record<string, TaskRef> = { helix, torus, hover };

/** Infer the task from a CSV filename such as runs/helix.csv. */
export function taskFromPath(path: string): TaskRef | undefined {
  const base = path.split(/[\\/]/).pop() ?? "";
  for (const name of Object.keys(TASKS)) {
    if (base.includes(name)) return TASKS[name];
  }
  return undefined;
}

/** Parse "approx_error_3_3.csv" style names into a legend label "M=3,N=3". */
export function sweepLabelFromPath(path: string): string {
  const base = (path.split(/[\\/]/).pop() ?? "").replace(/\.csv$/i, "");
  const match = base.match(/(\d+)[_-](\d+)$/);
  if (match) return `M=${match[1]},N=${match[2]}`;
  return base;
}
