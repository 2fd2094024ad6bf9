/**
 * Pointer-to-surface mapping: casts the pointer ray against the task's
 * interaction surface (plane / spheres / mesh from the env descriptor) and
 * returns the hit point, or null when the pointer is off-surface. The
 * surface constraint supplies the third input dimension a 2-D pointer
 * lacks, so dragging always produces points the task cares about.
 */
import type { EnvDescriptor, Vec3 } from "./protocol.js";

export interface Ray {
  origin: Vec3;
  direction: Vec3; // need not be normalized
}

const EPS = 1e-12;

function sub(a: Vec3, b: Vec3): Vec3 {
  return [a[0] - b[0], a[1] - b[1], a[2] - b[2]];
}
function dot(a: Vec3, b: Vec3): number {
  return a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
}
function cross(a: Vec3, b: Vec3): Vec3 {
  return [
    a[1] * b[2] - a[2] * b[1],
    a[2] * b[0] - a[0] * b[2],
    a[0] * b[1] - a[1] * b[0],
  ];
}
function at(ray: Ray, t: number): Vec3 {
  return [
    ray.origin[0] + t * ray.direction[0],
    ray.origin[1] + t * ray.direction[1],
    ray.origin[2] + t * ray.direction[2],
  ];
}

export function rayPlane(ray: Ray, point: Vec3, normal: Vec3): number | null {
  const denom = dot(ray.direction, normal);
  if (Math.abs(denom) < EPS) return null;
  const t = dot(sub(point, ray.origin), normal) / denom;
  return t >= 0 ? t : null;
}

/** Nearest non-negative ray parameter hitting the sphere, or null. */
export function raySphere(ray: Ray, center: Vec3, radius: number): number | null {
  const oc = sub(ray.origin, center);
  const a = dot(ray.direction, ray.direction);
  const b = 2 * dot(oc, ray.direction);
  const c = dot(oc, oc) - radius * radius;
  const disc = b * b - 4 * a * c;
  if (disc < 0) return null;
  const s = Math.sqrt(disc);
  const t0 = (-b - s) / (2 * a);
  const t1 = (-b + s) / (2 * a);
  if (t0 >= 0) return t0;
  if (t1 >= 0) return t1;
  return null;
}

/** Moller-Trumbore ray-triangle intersection; returns t or null. */
export function rayTriangle(ray: Ray, a: Vec3, b: Vec3, c: Vec3): number | null {
  const e1 = sub(b, a);
  const e2 = sub(c, a);
  const p = cross(ray.direction, e2);
  const det = dot(e1, p);
  if (Math.abs(det) < EPS) return null;
  const inv = 1 / det;
  const s = sub(ray.origin, a);
  const u = dot(s, p) * inv;
  if (u < 0 || u > 1) return null;
  const q = cross(s, e1);
  const v = dot(ray.direction, q) * inv;
  if (v < 0 || u + v > 1) return null;
  const t = dot(e2, q) * inv;
  return t >= 0 ? t : null;
}

/**
 * Map a pointer ray onto the task surface. Plane hits outside the task's
 * x/z working range count as off-surface; spheres and mesh take the
 * nearest front-facing hit.
 */
export function pointerToSurface(ray: Ray, env: EnvDescriptor): Vec3 | null {
  if (env.kind === "plane") {
    const t = rayPlane(ray, env.point, env.normal);
    if (t === null) return null;
    const p = at(ray, t);
    if (p[0] < env.x_range[0] || p[0] > env.x_range[1]) return null;
    if (p[2] < env.z_range[0] || p[2] > env.z_range[1]) return null;
    return p;
  }
  if (env.kind === "spheres") {
    let best: number | null = null;
    for (const s of env.spheres) {
      const t = raySphere(ray, s.center, s.radius);
      if (t !== null && (best === null || t < best)) best = t;
    }
    return best === null ? null : at(ray, best);
  }
  let best: number | null = null;
  for (const [i, j, k] of env.triangles) {
    const a = env.vertices[i];
    const b = env.vertices[j];
    const c = env.vertices[k];
    if (!a || !b || !c) continue;
    const t = rayTriangle(ray, a, b, c);
    if (t !== null && (best === null || t < best)) best = t;
  }
  return best === null ? null : at(ray, best);
}
