/**
 * Wire protocol for the teleop session service (JSON text frames over a
 * WebSocket, all values SI). Every outbound message is validated before it
 * is sent and every inbound frame is parsed against the versioned schema;
 * unknown or malformed frames are rejected at the boundary so the state
 * machine only ever sees well-typed messages.
 */
import { z } from "zod";

export const PROTOCOL_VERSION = 1;

const finite = z.number().finite();
export const vec3 = z.tuple([finite, finite, finite]);
export type Vec3 = z.infer<typeof vec3>;

// ---------------------------------------------------------------- outbound

export const initMessage = z.object({
  type: z.literal("init"),
  task: z.string().optional(),
  robot: z.string().optional(),
});

export const contextMessage = z.object({
  type: z.literal("context"),
  values: z.array(finite).min(1),
});

export const targetMessage = z.object({
  type: z.literal("target"),
  p: vec3,
});

export const recordMessage = z.object({
  type: z.literal("record"),
  action: z.enum(["start", "stop", "save"]),
});

export const playbackMessage = z.object({
  type: z.literal("playback"),
  model: z.string().min(1),
  context: z.array(finite),
  cadence: finite.nonnegative().optional(),
});

export const resetMessage = z.object({ type: z.literal("reset") });

export const clientMessage = z.discriminatedUnion("type", [
  initMessage,
  contextMessage,
  targetMessage,
  recordMessage,
  playbackMessage,
  resetMessage,
]);
export type ClientMessage = z.infer<typeof clientMessage>;

// ----------------------------------------------------------------- inbound

const sphere = z.object({ center: vec3, radius: finite.positive() });

const descriptorBase = z.object({
  schema: z.string(),
  context_dim: z.number().int().positive(),
  waypoints: z.number().int().positive(),
  predicted: z.array(vec3).optional(),
});

export const planeDescriptor = descriptorBase.extend({
  kind: z.literal("plane"),
  normal: vec3,
  point: vec3,
  x_range: z.tuple([finite, finite]),
  z_range: z.tuple([finite, finite]),
});

export const spheresDescriptor = descriptorBase.extend({
  kind: z.literal("spheres"),
  spheres: z.array(sphere).length(2),
});

export const meshDescriptor = descriptorBase.extend({
  kind: z.literal("mesh"),
  vertices: z.array(vec3).min(3),
  triangles: z.array(z.tuple([z.number().int(), z.number().int(), z.number().int()])).min(1),
});

export const envDescriptor = z.discriminatedUnion("kind", [
  planeDescriptor,
  spheresDescriptor,
  meshDescriptor,
]);
export type EnvDescriptor = z.infer<typeof envDescriptor>;

export const envMessage = z.object({
  type: z.literal("env"),
  version: z.literal(PROTOCOL_VERSION),
  descriptor: envDescriptor,
});

export const stateMessage = z.object({
  type: z.literal("state"),
  backbone: z.array(vec3).min(2),
  tip: vec3,
  config: z.object({
    tensions: z.array(finite),
    insertion: finite,
    rotation: finite,
  }),
  residual: finite.nonnegative(),
  recording: z.boolean(),
});
export type StateMessage = z.infer<typeof stateMessage>;

export const savedMessage = z.object({
  type: z.literal("saved"),
  index: z.number().int().positive(),
});

export const errorMessage = z.object({
  type: z.literal("error"),
  code: z.enum([
    "bad_message",
    "bad_context",
    "bad_model",
    "recording_active",
    "empty_recording",
    "incomplete_context",
    "schema_mismatch",
  ]),
  msg: z.string(),
});

export const serverMessage = z.discriminatedUnion("type", [
  envMessage,
  stateMessage,
  savedMessage,
  errorMessage,
]);
export type ServerMessage = z.infer<typeof serverMessage>;

/** Parse one inbound frame; returns null for anything malformed. */
export function parseServerFrame(raw: string): ServerMessage | null {
  let data: unknown;
  try {
    data = JSON.parse(raw);
  } catch {
    return null;
  }
  const result = serverMessage.safeParse(data);
  return result.success ? result.data : null;
}

/** Validate and serialize one outbound message; throws on invalid input. */
export function encodeClientMessage(msg: ClientMessage): string {
  return JSON.stringify(clientMessage.parse(msg));
}
