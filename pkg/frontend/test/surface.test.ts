import { describe, expect, it } from "vitest";
import { pointerToSurface, rayPlane, raySphere, rayTriangle, type Ray } from "../src/surface.js";
import type { EnvDescriptor, Vec3 } from "../src/protocol.js";

const plane: EnvDescriptor = {
  schema: "eight_plane",
  context_dim: 6,
  waypoints: 50,
  kind: "plane",
  normal: [0, 1, 0],
  point: [0, 0.05, 0.11],
  x_range: [-0.12, 0.12],
  z_range: [0.01, 0.21],
};

const spheres: EnvDescriptor = {
  schema: "double_sphere",
  context_dim: 6,
  waypoints: 50,
  kind: "spheres",
  spheres: [
    { center: [0, 0.07, 0.1], radius: 0.02 },
    { center: [0, 0.07, 0.135], radius: 0.015 },
  ],
};

function ray(origin: Vec3, direction: Vec3): Ray {
  return { origin, direction };
}

describe("plane mapping", () => {
  it("drag points all land on the constant-y task plane", () => {
    for (let i = 0; i < 50; i++) {
      const x = -0.1 + 0.004 * i;
      const hit = pointerToSurface(ray([x, -0.3, 0.11 + 0.001 * i], [0.01, 1, 0.002]), plane);
      expect(hit).not.toBeNull();
      expect(hit![1]).toBeCloseTo(0.05, 12); // y fixed by the surface constraint
    }
  });

  it("returns null off the working range, behind the ray, or parallel", () => {
    expect(pointerToSurface(ray([0.5, -0.3, 0.11], [0, 1, 0]), plane)).toBeNull(); // x out of range
    expect(pointerToSurface(ray([0, -0.3, 0.5], [0, 1, 0]), plane)).toBeNull(); // z out of range
    expect(pointerToSurface(ray([0, 0.3, 0.11], [0, 1, 0]), plane)).toBeNull(); // plane behind
    expect(pointerToSurface(ray([0, -0.3, 0.11], [1, 0, 0]), plane)).toBeNull(); // parallel
    expect(rayPlane(ray([0, 0, 0], [1, 0, 0]), [0, 1, 0], [0, 1, 0])).toBeNull();
  });
});

describe("sphere mapping", () => {
  it("hits land exactly on a sphere surface, nearest sphere first", () => {
    const hit = pointerToSurface(ray([0, -0.3, 0.1], [0, 1, 0]), spheres);
    expect(hit).not.toBeNull();
    const d1 = Math.hypot(hit![0] - 0, hit![1] - 0.07, hit![2] - 0.1);
    expect(d1).toBeCloseTo(0.02, 10); // front surface of sphere 1
    expect(hit![1]).toBeCloseTo(0.05, 10); // nearest intersection, not the back one
  });

  it("hits the second sphere when aimed at it, misses off both", () => {
    const hit = pointerToSurface(ray([0, -0.3, 0.135], [0, 1, 0]), spheres);
    const d2 = Math.hypot(hit![0], hit![1] - 0.07, hit![2] - 0.135);
    expect(d2).toBeCloseTo(0.015, 10);
    expect(pointerToSurface(ray([0.3, -0.3, 0.3], [0, 1, 0]), spheres)).toBeNull();
    expect(raySphere(ray([0, 0, 0], [0, 0, 1]), [1, 0, 0], 0.5)).toBeNull();
  });

  it("a ray starting inside a sphere exits through the far surface", () => {
    const t = raySphere(ray([0, 0.07, 0.1], [0, 1, 0]), [0, 0.07, 0.1], 0.02);
    expect(t).toBeCloseTo(0.02, 10);
  });
});

describe("mesh mapping", () => {
  const mesh: EnvDescriptor = {
    schema: "anatomy",
    context_dim: 5,
    waypoints: 50,
    kind: "mesh",
    vertices: [
      [-1, 0, -1],
      [1, 0, -1],
      [0, 0, 1], // near triangle at y=0
      [-1, 0.5, -1],
      [1, 0.5, -1],
      [0, 0.5, 1], // far triangle at y=0.5
    ],
    triangles: [
      [0, 1, 2],
      [3, 4, 5],
    ],
  };

  it("picks the nearest triangle along the ray", () => {
    const hit = pointerToSurface(ray([0, -1, 0], [0, 1, 0]), mesh);
    expect(hit).toEqual([0, 0, 0]);
  });

  it("misses outside every triangle and behind the origin", () => {
    expect(pointerToSurface(ray([5, -1, 5], [0, 1, 0]), mesh)).toBeNull();
    expect(pointerToSurface(ray([0, 1, 0], [0, 1, 0]), mesh)).toBeNull();
    expect(rayTriangle(ray([0, -1, 0], [1, 0, 0]), [-1, 0, -1], [1, 0, -1], [0, 0, 1])).toBeNull();
  });

  it("barycentric edge cases: vertex and edge hits count as hits", () => {
    const a: Vec3 = [0, 0, 0];
    const b: Vec3 = [1, 0, 0];
    const c: Vec3 = [0, 0, 1];
    expect(rayTriangle(ray([0, -1, 0], [0, 1, 0]), a, b, c)).toBeCloseTo(1, 12); // vertex
    expect(rayTriangle(ray([0.5, -1, 0], [0, 1, 0]), a, b, c)).toBeCloseTo(1, 12); // edge ab
    expect(rayTriangle(ray([0.5, -1, 0.5], [0, 1, 0]), a, b, c)).toBeCloseTo(1, 12); // hypotenuse
    expect(rayTriangle(ray([0.51, -1, 0.51], [0, 1, 0]), a, b, c)).toBeNull(); // just outside
  });
});
