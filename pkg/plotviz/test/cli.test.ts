import { existsSync, mkdtempSync, readFileSync, writeFileSync } from "node:fs";
import { tmpdir } from "node:os";
import { join } from "node:path";
import { beforeAll, describe, expect, it } from "vitest";

import { TRACKING_SCHEMA } from "../src/csv.js";
import { parseArgs, run } from "../src/main.js";
import { TASKS } from "../src/tasks.js";

let dir: string;

beforeAll(() => {
  dir = mkdtempSync(join(tmpdir(), "plotviz-cli-"));
  const sweep = ["t,err_x,err_v,psi"];
  for (let i = 0; i <= 20; i++) {
    sweep.push([i * 0.5, 1e-3 * (i + 1), 2e-3 * (i + 1), 1e-6 * (i + 1)].join(","));
  }
  writeFileSync(join(dir, "approx_error_3_3.csv"), sweep.join("\n") + "\n");

  const track = [TRACKING_SCHEMA.join(",")];
  for (let i = 0; i <= 30; i++) {
    const t = i * 0.05;
    const [x1, x2, x3] = TASKS.helix.xRef(t);
    const row = TRACKING_SCHEMA.map((c) => {
      switch (c) {
        case "t": return t;
        case "x1": return x1;
        case "x2": return x2;
        case "x3": return x3;
        case "r11": case "r22": case "r33": return 1;
        case "psi": return 1e-4;
        default: return 0;
      }
    });
    track.push(row.join(","));
  }
  writeFileSync(join(dir, "helix.csv"), track.join("\n") + "\n");
});

describe("parseArgs", () => {
  it("parses kind, inputs, and output", () => {
    const args = parseArgs(["error-sweep", "a.csv", "b.csv", "-o", "out.svg"]);
    expect(args.kind).toBe("error-sweep");
    expect(args.inputs).toEqual(["a.csv", "b.csv"]);
    expect(args.out).toBe("out.svg");
  });

  it("rejects missing output", () => {
    expect(() => parseArgs(["tracking", "a.csv"])).toThrowError(/usage/);
  });
});

describe("run", () => {
  it("writes an error-sweep figure and exits 0", () => {
    const out = join(dir, "sweep.svg");
    expect(run(["error-sweep", join(dir, "approx_error_3_3.csv"), "-o", out])).toBe(0);
    expect(existsSync(out)).toBe(true);
    expect(readFileSync(out, "utf8")).toContain("<svg");
  });

  it("writes a tracking figure and exits 0", () => {
    const out = join(dir, "helix.svg");
    expect(run(["tracking", join(dir, "helix.csv"), "-o", out])).toBe(0);
    expect(readFileSync(out, "utf8")).toContain("panel-path3d");
  });

  it("redirects png requests to svg", () => {
    const out = join(dir, "helix.png");
    expect(run(["tracking", join(dir, "helix.csv"), "-o", out])).toBe(0);
    expect(existsSync(join(dir, "helix.svg"))).toBe(true);
  });

  it("exits 1 on a missing input", () => {
    expect(run(["tracking", join(dir, "missing.csv"), "-o", join(dir, "x.svg")])).toBe(1);
  });

  it("exits 2 on bad usage", () => {
    expect(run(["tracking"])).toBe(2);
  });

  it("exits 1 on an unknown kind", () => {
    expect(run(["scatter", join(dir, "helix.csv"), "-o", join(dir, "x.svg")])).toBe(1);
  });
});
