/**
 * Minimal orbit camera: spherical coordinates around a fixed task-specific
 * pivot, driven by pointer deltas and wheel zoom. The initial pose is a
 * pure function of the task schema so screenshots and golden fixtures are
 * deterministic.
 */
import type { Vec3 } from "./protocol.js";

export interface OrbitPose {
  pivot: Vec3;
  radius: number;
  /** Azimuth around +z (up axis of the robot workspace), radians. */
  theta: number;
  /** Elevation from the x-y plane, radians. */
  phi: number;
}

export const INITIAL_POSE: Record<string, OrbitPose> = {
  eight_plane: { pivot: [0, 0.03, 0.1], radius: 0.35, theta: -Math.PI / 2, phi: 0.3 },
  double_sphere: { pivot: [0, 0.05, 0.1], radius: 0.35, theta: -Math.PI / 2, phi: 0.25 },
  anatomy: { pivot: [0, 0, 0.13], radius: 0.4, theta: -Math.PI / 2, phi: 0.35 },
};

export function initialPose(schema: string): OrbitPose {
  const pose = INITIAL_POSE[schema] ?? { pivot: [0, 0, 0.1], radius: 0.4, theta: -Math.PI / 2, phi: 0.3 };
  return { ...pose, pivot: [...pose.pivot] as Vec3 };
}

const PHI_LIMIT = Math.PI / 2 - 1e-3;

export function rotate(pose: OrbitPose, dTheta: number, dPhi: number): OrbitPose {
  return {
    ...pose,
    theta: pose.theta + dTheta,
    phi: Math.max(-PHI_LIMIT, Math.min(PHI_LIMIT, pose.phi + dPhi)),
  };
}

export function zoom(pose: OrbitPose, factor: number): OrbitPose {
  return { ...pose, radius: Math.max(0.05, Math.min(5, pose.radius * factor)) };
}

/** Camera position in world space; the workspace up axis is +z. */
export function cameraPosition(pose: OrbitPose): Vec3 {
  const c = Math.cos(pose.phi);
  return [
    pose.pivot[0] + pose.radius * c * Math.cos(pose.theta),
    pose.pivot[1] + pose.radius * c * Math.sin(pose.theta),
    pose.pivot[2] + pose.radius * Math.sin(pose.phi),
  ];
}
