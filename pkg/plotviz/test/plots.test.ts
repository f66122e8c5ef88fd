import { mkdtempSync, writeFileSync } from "node:fs";
import { tmpdir } from "node:os";
import { join } from "node:path";
import { beforeAll, describe, expect, it } from "vitest";

import { TRACKING_SCHEMA } from "../src/csv.js";
import { plotErrorSweep, plotTracking } from "../src/plots.js";
import { sweepLabelFromPath, taskFromPath, TASKS } from "../src/tasks.js";

let dir: string;

function sweepCsv(name: string, scale: number): string {
  const lines = ["t,err_x,err_v,psi"];
  for (let i = 0; i <= 40; i++) {
    const t = i * 0.25;
    lines.push(
      [t, scale * (1e-4 + 1e-3 * t), scale * (2e-4 + 2e-3 * t), scale * 1e-6 * (1 + t)].join(","),
    );
  }
  const path = join(dir, name);
  writeFileSync(path, lines.join("\n") + "\n");
  return path;
}

function trackingCsv(name: string, task: string): string {
  const lines = [TRACKING_SCHEMA.join(",")];
  const ref = TASKS[task];
  for (let i = 0; i <= 60; i++) {
    const t = i * 0.05;
    const [x1, x2, x3] = ref.xRef(t);
    const row = new Map<string, number>();
    TRACKING_SCHEMA.forEach((c) => row.set(c, 0));
    row.set("t", t);
    row.set("x1", x1 + 0.01 * Math.sin(t));
    row.set("x2", x2);
    row.set("x3", x3);
    row.set("v1", 0.05);
    row.set("r11", 1);
    row.set("r22", 1);
    row.set("r33", 1);
    row.set("f", 8.9);
    row.set("psi", 1e-4 * (1 + Math.sin(t) ** 2));
    row.set("err_pos", 0.01);
    row.set("qp_iters", 10);
    lines.push(TRACKING_SCHEMA.map((c) => row.get(c)).join(","));
  }
  const path = join(dir, name);
  writeFileSync(path, lines.join("\n") + "\n");
  return path;
}

beforeAll(() => {
  dir = mkdtempSync(join(tmpdir(), "plotviz-fig-"));
});

describe("filename parsing", () => {
  it("extracts sweep labels", () => {
    expect(sweepLabelFromPath("runs/approx_error_3_3.csv")).toBe("M=3,N=3");
    expect(sweepLabelFromPath("approx_error_10_2.csv")).toBe("M=10,N=2");
  });

  it("infers tasks from tracking filenames", () => {
    expect(taskFromPath("runs/helix.csv")?.name).toBe("helix");
    expect(taskFromPath("torus.csv")?.name).toBe("torus");
    expect(taskFromPath("runs/unknown.csv")).toBeUndefined();
  });
});

describe("plotErrorSweep", () => {
  it("renders three panels with one curve per input", () => {
    const paths = [
      sweepCsv("approx_error_3_3.csv", 10),
      sweepCsv("approx_error_4_4.csv", 3),
      sweepCsv("approx_error_5_5.csv", 1),
    ];
    const svg = plotErrorSweep(paths);
    expect(svg).toContain("<svg");
    for (const panel of ["panel-err_x", "panel-err_v", "panel-psi"]) {
      expect(svg).toContain(panel);
      const section = svg.split(`class="${panel}"`)[1].split("</g>")[0];
      expect(section.split("<polyline").length - 1).toBe(3);
    }
    expect(svg).toContain("M=3,N=3");
    expect(svg).toContain("M=5,N=5");
  });

  it("rejects an empty file naming it", () => {
    const empty = join(dir, "approx_error_9_9.csv");
    writeFileSync(empty, "");
    expect(() => plotErrorSweep([empty])).toThrowError(/approx_error_9_9\.csv/);
  });

  it("rejects schema drift with a column diff", () => {
    const bad = join(dir, "approx_error_8_8.csv");
    writeFileSync(bad, "t,err_x,psi\n0,0,0\n");
    expect(() => plotErrorSweep([bad])).toThrowError(/missing: err_v/);
  });
});

describe("plotTracking", () => {
  it("renders the three panels for each task", () => {
    for (const task of ["helix", "torus", "hover"]) {
      const svg = plotTracking(trackingCsv(`${task}.csv`, task));
      expect(svg).toContain("panel-path3d");
      expect(svg).toContain("panel-posvel");
      expect(svg).toContain("panel-psi");
      expect(svg).toContain(`(a) ${task}`);
    }
  });

  it("marks start and goal on the path panel", () => {
    const svg = plotTracking(trackingCsv("hover.csv", "hover"));
    expect(svg).toContain("start");
    expect(svg).toContain("goal");
    expect(svg.split("<circle").length - 1).toBeGreaterThanOrEqual(2);
  });

  it("needs a task name when the filename is opaque", () => {
    const path = trackingCsv("mystery.csv", "helix");
    expect(() => plotTracking(path)).toThrowError(/--task/);
    expect(plotTracking(path, "helix")).toContain("panel-psi");
  });
});
