/**
 * Scene geometry construction, kept separate from WebGL so it can be
 * golden-tested headlessly: buildSceneBuffers turns a SceneState into flat
 * Float32Array vertex buffers (backbone polyline, recorded path in green,
 * predicted overlay in pink, environment geometry, tip/target markers),
 * and hashBuffers gives a stable fingerprint of all of them. The three.js
 * view layer consumes these buffers verbatim.
 */
import type { SceneState } from "./state.js";
import type { EnvDescriptor, Vec3 } from "./protocol.js";

export interface SceneBuffers {
  /** Latest server backbone polyline, x/y/z interleaved. */
  backbone: Float32Array;
  recordedPath: Float32Array;
  predictedPath: Float32Array;
  /** Environment line segments (plane grid / sphere wireframes) or mesh triangles. */
  environment: Float32Array;
  environmentIsMesh: boolean;
  tip: Vec3 | null;
  target: Vec3 | null;
}

function flatten(points: readonly Vec3[]): Float32Array {
  const out = new Float32Array(points.length * 3);
  points.forEach((p, i) => out.set(p, i * 3));
  return out;
}

const GRID_DIVISIONS = 10;
const SPHERE_SEGMENTS = 32;

/** Grid line segments spanning the plane's working range at constant y. */
export function planeGrid(env: Extract<EnvDescriptor, { kind: "plane" }>): Float32Array {
  const y = env.point[1];
  const [x0, x1] = env.x_range;
  const [z0, z1] = env.z_range;
  const pts: number[] = [];
  for (let i = 0; i <= GRID_DIVISIONS; i++) {
    const f = i / GRID_DIVISIONS;
    const x = x0 + f * (x1 - x0);
    const z = z0 + f * (z1 - z0);
    pts.push(x, y, z0, x, y, z1); // line along z
    pts.push(x0, y, z, x1, y, z); // line along x
  }
  return new Float32Array(pts);
}

/** Three great-circle wireframes per sphere. */
export function sphereWireframe(center: Vec3, radius: number): Float32Array {
  const pts: number[] = [];
  const circle = (fx: (a: number) => Vec3) => {
    for (let i = 0; i < SPHERE_SEGMENTS; i++) {
      const a0 = (2 * Math.PI * i) / SPHERE_SEGMENTS;
      const a1 = (2 * Math.PI * (i + 1)) / SPHERE_SEGMENTS;
      pts.push(...fx(a0), ...fx(a1));
    }
  };
  circle((a) => [center[0] + radius * Math.cos(a), center[1] + radius * Math.sin(a), center[2]]);
  circle((a) => [center[0] + radius * Math.cos(a), center[1], center[2] + radius * Math.sin(a)]);
  circle((a) => [center[0], center[1] + radius * Math.cos(a), center[2] + radius * Math.sin(a)]);
  return new Float32Array(pts);
}

function environmentBuffer(env: EnvDescriptor | null): { buf: Float32Array; isMesh: boolean } {
  if (env === null) return { buf: new Float32Array(0), isMesh: false };
  if (env.kind === "plane") return { buf: planeGrid(env), isMesh: false };
  if (env.kind === "spheres") {
    const parts = env.spheres.map((s) => sphereWireframe(s.center, s.radius));
    const total = parts.reduce((n, p) => n + p.length, 0);
    const buf = new Float32Array(total);
    let off = 0;
    for (const p of parts) {
      buf.set(p, off);
      off += p.length;
    }
    return { buf, isMesh: false };
  }
  const buf = new Float32Array(env.triangles.length * 9);
  env.triangles.forEach(([i, j, k], n) => {
    const a = env.vertices[i];
    const b = env.vertices[j];
    const c = env.vertices[k];
    if (a && b && c) {
      buf.set(a, n * 9);
      buf.set(b, n * 9 + 3);
      buf.set(c, n * 9 + 6);
    }
  });
  return { buf, isMesh: true };
}

export function buildSceneBuffers(state: SceneState): SceneBuffers {
  const env = environmentBuffer(state.env);
  return {
    backbone: state.pose ? flatten(state.pose.backbone) : new Float32Array(0),
    recordedPath: flatten(state.recordedPath),
    predictedPath: state.predictedPath ? flatten(state.predictedPath) : new Float32Array(0),
    environment: env.buf,
    environmentIsMesh: env.isMesh,
    tip: state.pose ? state.pose.tip : null,
    target: state.target,
  };
}

/** FNV-1a over the exact float bit patterns of every buffer, for goldens. */
export function hashBuffers(buffers: SceneBuffers): string {
  let h = 0x811c9dc5;
  const mix = (byte: number) => {
    h ^= byte;
    h = Math.imul(h, 0x01000193) >>> 0;
  };
  for (const buf of [
    buffers.backbone,
    buffers.recordedPath,
    buffers.predictedPath,
    buffers.environment,
  ]) {
    const bytes = new Uint8Array(buf.buffer, buf.byteOffset, buf.byteLength);
    for (const b of bytes) mix(b);
    mix(0xff); // buffer separator
  }
  for (const p of [buffers.tip, buffers.target]) {
    const bytes = new Uint8Array(new Float64Array(p ?? [NaN, NaN, NaN]).buffer);
    for (const b of bytes) mix(b);
    mix(0xfe);
  }
  return h.toString(16).padStart(8, "0");
}
