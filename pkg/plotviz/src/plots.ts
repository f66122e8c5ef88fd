/**
 * Figure layouts.
 *
 * Error sweep: three stacked log-y panels (position, velocity, attitude
 * distance) with one curve per (M, N) input file.
 *
 * Tracking: (a) 3D flown vs reference path in an orthographic projection,
 * (b) position and velocity components over time, (c) attitude error over
 * time.
 */

import { column, ERROR_SWEEP_SCHEMA, readCsv, requireSchema, Table, TRACKING_SCHEMA } from "./csv.js";
import { sweepLabelFromPath, taskFromPath, TaskRef, TASKS } from "./tasks.js";
import {
  drawPanel,
  extent,
  Extent,
  padded,
  SERIES_COLORS,
  SvgScene,
} from "./svg.js";

const WIDTH = 760;

interface SweepInput {
  label: string;
  table: Table;
}

export function plotErrorSweep(paths: string[]): string {
  if (paths.length === 0) throw new Error("error-sweep needs at least one CSV");
  const inputs: SweepInput[] = paths.map((p) => {
    const table = readCsv(p);
    requireSchema(table, ERROR_SWEEP_SCHEMA);
    return { label: sweepLabelFromPath(p), table };
  });

  const panelH = 220;
  const scene = new SvgScene(WIDTH, 3 * panelH + 40);
  const panels: Array<{ col: string; title: string }> = [
    { col: "err_x", title: "(a) normalized position error" },
    { col: "err_v", title: "(b) normalized velocity error" },
    { col: "psi", title: "(c) attitude distance" },
  ];

  const tDomain = padded(
    extent(inputs.flatMap((inp) => Array.from(column(inp.table, "t")))),
    0.01,
  );

  panels.forEach((panel, idx) => {
    const values = inputs.flatMap((inp) =>
      Array.from(column(inp.table, panel.col)).filter((v) => v > 0),
    );
    const yDomain: Extent = values.length > 0 ? extent(values) : { min: 1e-12, max: 1 };
    const frame = { x: 0, y: idx * panelH + 8, width: WIDTH, height: panelH };
    const { sx, sy } = drawPanel(scene, frame, tDomain, yDomain, {
      title: panel.title,
      xLabel: idx === 2 ? "time [s]" : undefined,
      logY: true,
    });
    scene.open(`panel-${panel.col}`);
    inputs.forEach((inp, si) => {
      const t = column(inp.table, "t");
      const v = column(inp.table, panel.col);
      scene.polyline(
        Array.from(t, (tv) => sx(tv)),
        Array.from(v, (vv) => sy(vv)),
        SERIES_COLORS[si % SERIES_COLORS.length],
      );
    });
    scene.close();
    if (idx === 0) {
      inputs.forEach((inp, si) => {
        const lx = WIDTH - 150;
        const ly = 30 + 16 * si;
        scene.line(lx, ly - 4, lx + 22, ly - 4, SERIES_COLORS[si % SERIES_COLORS.length], 2);
        scene.text(lx + 28, ly, inp.label, { size: 11 });
      });
    }
  });
  return scene.render();
}

function project3d(
  x: number,
  y: number,
  z: number,
  yaw = Math.PI / 5,
  pitch = Math.PI / 8,
): [number, number] {
  // orthographic view: rotate about z by yaw, then tilt by pitch
  const cx = Math.cos(yaw), sx = Math.sin(yaw);
  const u = cx * x + sx * y;
  const w = -sx * x + cx * y;
  const cp = Math.cos(pitch), sp = Math.sin(pitch);
  return [u, cp * z + sp * w];
}

export function plotTracking(path: string, taskOverride?: string): string {
  const table = readCsv(path);
  requireSchema(table, TRACKING_SCHEMA);
  const task: TaskRef | undefined = taskOverride ? TASKS[taskOverride] : taskFromPath(path);
  if (taskOverride && !task) throw new Error(`unknown task '${taskOverride}'`);
  if (!task) {
    throw new Error(
      `${path}: cannot infer the task from the filename; pass --task helix|torus|hover`,
    );
  }

  const t = column(table, "t");
  const xs = [column(table, "x1"), column(table, "x2"), column(table, "x3")];
  const vs = [column(table, "v1"), column(table, "v2"), column(table, "v3")];
  const psi = column(table, "psi");
  const refs: [number[], number[], number[]] = [[], [], []];
  for (let i = 0; i < table.rows; i++) {
    const r = task.xRef(t[i]);
    refs[0].push(r[0]);
    refs[1].push(r[1]);
    refs[2].push(r[2]);
  }

  const scene = new SvgScene(WIDTH, 720);

  // (a) 3D path, flown vs reference
  const proj = { act: [[], []] as number[][], ref: [[], []] as number[][] };
  for (let i = 0; i < table.rows; i++) {
    const [ua, wa] = project3d(xs[0][i], xs[1][i], xs[2][i]);
    proj.act[0].push(ua);
    proj.act[1].push(wa);
    const [ur, wr] = project3d(refs[0][i], refs[1][i], refs[2][i]);
    proj.ref[0].push(ur);
    proj.ref[1].push(wr);
  }
  const uDom = padded(extent([...proj.act[0], ...proj.ref[0]]));
  const wDom = padded(extent([...proj.act[1], ...proj.ref[1]]));
  const frameA = { x: 0, y: 8, width: WIDTH, height: 270 };
  const a = drawPanel(scene, frameA, uDom, wDom, {
    title: `(a) ${task.name}: flown vs reference path (orthographic view)`,
  });
  scene.open("panel-path3d");
  scene.polyline(
    proj.ref[0].map(a.sx),
    proj.ref[1].map(a.sy),
    "#888",
    1.4,
    "6 4",
  );
  scene.polyline(proj.act[0].map(a.sx), proj.act[1].map(a.sy), "#1f77b4", 1.4);
  scene.circle(a.sx(proj.act[0][0]), a.sy(proj.act[1][0]), 4, "#2ca02c");
  scene.circle(
    a.sx(proj.ref[0][proj.ref[0].length - 1]),
    a.sy(proj.ref[1][proj.ref[1].length - 1]),
    4,
    "#d62728",
  );
  scene.close();
  scene.text(60, 24, "start", { size: 10 });
  scene.line(54, 20, 58, 20, "#2ca02c", 6);
  scene.text(110, 24, "goal/ref end", { size: 10 });
  scene.line(104, 20, 108, 20, "#d62728", 6);

  // (b) position and velocity components over time
  const frameB = { x: 0, y: 286, width: WIDTH, height: 220 };
  const tDom = padded(extent(Array.from(t)), 0.01);
  const valsB = [
    ...xs.flatMap((c) => Array.from(c)),
    ...vs.flatMap((c) => Array.from(c)),
    ...refs.flat(),
  ];
  const b = drawPanel(scene, frameB, tDom, padded(extent(valsB)), {
    title: "(b) position [m] (solid, ref dotted) and velocity [m/s] (dashed)",
  });
  scene.open("panel-posvel");
  for (let k = 0; k < 3; k++) {
    const color = SERIES_COLORS[k];
    scene.polyline(Array.from(t, b.sx), refs[k].map(b.sy), color, 1.0, "2 3");
    scene.polyline(Array.from(t, b.sx), Array.from(xs[k], b.sy), color, 1.4);
    scene.polyline(Array.from(t, b.sx), Array.from(vs[k], b.sy), color, 1.0, "7 3");
  }
  scene.close();
  ["x/v 1", "x/v 2", "x/v 3"].forEach((label, k) => {
    const lx = WIDTH - 210 + 70 * k;
    scene.line(lx, 300, lx + 18, 300, SERIES_COLORS[k], 2);
    scene.text(lx + 22, 304, label, { size: 10 });
  });

  // (c) attitude error over time
  const frameC = { x: 0, y: 512, width: WIDTH, height: 200 };
  const psiVals = Array.from(psi).filter((v) => v > 0);
  const cDom: Extent = psiVals.length > 0 ? extent(psiVals) : { min: 1e-12, max: 1 };
  const c = drawPanel(scene, frameC, tDom, cDom, {
    title: "(c) attitude error",
    xLabel: "time [s]",
    logY: true,
  });
  scene.open("panel-psi");
  scene.polyline(Array.from(t, c.sx), Array.from(psi, c.sy), "#d62728", 1.4);
  scene.close();

  return scene.render();
}
