/**
 * Server-authoritative client state machine.
 *
 * The scene is a pure fold over inbound server messages: the robot pose
 * (backbone, tip, config, residual) is only ever replaced wholesale by a
 * state frame, never extrapolated or mutated locally. The recorded-path
 * polyline mirrors the achieved tips the server reported while the
 * recording flag was set, so what the user sees saved is exactly what the
 * server stored (before resampling).
 */
import type { EnvDescriptor, ServerMessage, StateMessage, Vec3 } from "./protocol.js";

export interface SceneState {
  env: EnvDescriptor | null;
  /** Latest server pose; null until the first state frame arrives. */
  pose: StateMessage | null;
  /** Local drag target marker (outbound intent, rendered distinctly). */
  target: Vec3 | null;
  /** Achieved tips streamed while recording was active. */
  recordedPath: Vec3[];
  /** Model-predicted curve from the latest playback env overlay. */
  predictedPath: Vec3[] | null;
  recording: boolean;
  lastSavedIndex: number | null;
  lastError: { code: string; msg: string } | null;
  /** Counts every applied state frame (playback animation bookkeeping). */
  stateFrames: number;
}

export function initialState(): SceneState {
  return {
    env: null,
    pose: null,
    target: null,
    recordedPath: [],
    predictedPath: null,
    recording: false,
    lastSavedIndex: null,
    lastError: null,
    stateFrames: 0,
  };
}

/** Fold one server message into the scene; returns a new state object. */
export function applyServerMessage(state: SceneState, msg: ServerMessage): SceneState {
  switch (msg.type) {
    case "env": {
      const predicted = msg.descriptor.predicted;
      return {
        ...state,
        env: msg.descriptor,
        predictedPath: predicted ? predicted.map((p) => [...p] as Vec3) : state.predictedPath,
        lastError: null,
      };
    }
    case "state": {
      // Mirror the server's buffer exactly: the record-start ack frame is
      // not appended server-side, only target echoes while recording are.
      const recordedPath =
        msg.recording && !state.recording
          ? [] // recording just started: fresh, empty polyline
          : msg.recording
            ? [...state.recordedPath, msg.tip]
            : state.recordedPath;
      return {
        ...state,
        pose: msg,
        recording: msg.recording,
        recordedPath,
        stateFrames: state.stateFrames + 1,
        lastError: null,
      };
    }
    case "saved":
      return { ...state, lastSavedIndex: msg.index, recordedPath: [], lastError: null };
    case "error":
      return { ...state, lastError: { code: msg.code, msg: msg.msg } };
  }
}

/** The only pose the view may render: the latest server state, verbatim. */
export function renderablePose(state: SceneState): StateMessage | null {
  return state.pose;
}

/** Save is offered only after a stop with points in the buffer and a context. */
export function saveEnabled(state: SceneState, contextComplete: boolean): boolean {
  return !state.recording && state.recordedPath.length >= 2 && contextComplete;
}

/**
 * Validate a context form against the env descriptor: the wire context may
 * omit the trailing bias element, so context_dim or context_dim - 1 values
 * are complete. Range hints are advisory and never block submission.
 */
export function contextComplete(state: SceneState, values: number[]): boolean {
  if (!state.env) return false;
  if (!values.every((v) => Number.isFinite(v))) return false;
  const k = state.env.context_dim;
  return values.length === k || values.length === k - 1;
}
