import { describe, expect, it } from "vitest";
import {
  applyServerMessage,
  contextComplete,
  initialState,
  renderablePose,
  saveEnabled,
} from "../src/state.js";
import type { ServerMessage, StateMessage } from "../src/protocol.js";

function stateMsg(tip: [number, number, number], recording: boolean): StateMessage {
  return {
    type: "state",
    backbone: [[0, 0, 0], tip],
    tip,
    config: { tensions: [0, 0, 0], insertion: 0.2, rotation: 0 },
    residual: 1e-5,
    recording,
  };
}

const envMsg: ServerMessage = {
  type: "env",
  version: 1,
  descriptor: {
    schema: "eight_plane",
    context_dim: 6,
    waypoints: 50,
    kind: "plane",
    normal: [0, 1, 0],
    point: [0, 0.05, 0.11],
    x_range: [-0.12, 0.12],
    z_range: [0.01, 0.21],
  },
};

describe("server-authoritative pose", () => {
  it("never renders a pose that did not arrive in a state message", () => {
    const poses: StateMessage[] = [];
    let s = initialState();
    expect(renderablePose(s)).toBeNull();
    const seq: ServerMessage[] = [
      envMsg,
      stateMsg([0, 0, 0.2], false),
      { type: "error", code: "bad_message", msg: "x" },
      stateMsg([0.01, 0.02, 0.19], true),
      { type: "saved", index: 1 },
      stateMsg([0.02, 0.02, 0.18], true),
      envMsg,
    ];
    for (const msg of seq) {
      if (msg.type === "state") poses.push(msg);
      s = applyServerMessage(s, msg);
      const pose = renderablePose(s);
      if (pose !== null) expect(poses).toContain(pose); // identity, not copy
    }
    expect(renderablePose(s)).toBe(poses[poses.length - 1]);
  });

  it("records exactly the achieved tips streamed while recording", () => {
    let s = initialState();
    s = applyServerMessage(s, stateMsg([0, 0, 0.2], false)); // not recording yet
    s = applyServerMessage(s, stateMsg([0, 0, 0.2], true)); // start ack: not a tip
    s = applyServerMessage(s, stateMsg([0.01, 0, 0.2], true));
    s = applyServerMessage(s, stateMsg([0.02, 0, 0.19], true));
    s = applyServerMessage(s, stateMsg([0.03, 0, 0.18], false)); // stop ack
    expect(s.recordedPath).toEqual([
      [0.01, 0, 0.2],
      [0.02, 0, 0.19],
    ]);
    // a fresh start discards the previous polyline
    s = applyServerMessage(s, stateMsg([0.05, 0, 0.2], true));
    expect(s.recordedPath).toEqual([]);
  });

  it("clears the recorded path on save ack and keeps the index", () => {
    let s = initialState();
    s = applyServerMessage(s, stateMsg([0, 0, 0.2], true));
    s = applyServerMessage(s, stateMsg([0.01, 0, 0.2], false));
    s = applyServerMessage(s, { type: "saved", index: 4 });
    expect(s.recordedPath).toEqual([]);
    expect(s.lastSavedIndex).toBe(4);
  });

  it("keeps the playback overlay after the animation ends", () => {
    let s = initialState();
    const overlay = {
      ...envMsg,
      descriptor: { ...envMsg.descriptor, predicted: [[0, 0, 0.1], [0.01, 0, 0.12]] },
    } as ServerMessage;
    s = applyServerMessage(s, overlay);
    s = applyServerMessage(s, stateMsg([0, 0, 0.1], false));
    s = applyServerMessage(s, stateMsg([0.01, 0, 0.12], false));
    expect(s.predictedPath).toHaveLength(2);
    expect(s.stateFrames).toBe(2);
  });
});

describe("controls gating", () => {
  it("enables save only after stop with points and a complete context", () => {
    let s = initialState();
    s = applyServerMessage(s, envMsg);
    expect(saveEnabled(s, true)).toBe(false); // nothing recorded
    s = applyServerMessage(s, stateMsg([0, 0, 0.2], true)); // start ack
    s = applyServerMessage(s, stateMsg([0.01, 0, 0.2], true));
    s = applyServerMessage(s, stateMsg([0.02, 0, 0.2], true));
    expect(saveEnabled(s, true)).toBe(false); // still recording
    s = applyServerMessage(s, stateMsg([0.01, 0, 0.2], false));
    expect(saveEnabled(s, true)).toBe(true);
    expect(saveEnabled(s, false)).toBe(false); // incomplete context
  });

  it("accepts context with or without the trailing bias element", () => {
    let s = initialState();
    expect(contextComplete(s, [1, 2, 3, 4, 5])).toBe(false); // no env yet
    s = applyServerMessage(s, envMsg);
    expect(contextComplete(s, [0, 0.05, 0.11, 0.025, 0.025])).toBe(true);
    expect(contextComplete(s, [0, 0.05, 0.11, 0.025, 0.025, 1])).toBe(true);
    expect(contextComplete(s, [0, 0.05, 0.11])).toBe(false);
    expect(contextComplete(s, [0, 0.05, 0.11, 0.025, NaN])).toBe(false);
  });

  it("error frames surface and clear on the next good frame", () => {
    let s = initialState();
    s = applyServerMessage(s, { type: "error", code: "schema_mismatch", msg: "nope" });
    expect(s.lastError?.code).toBe("schema_mismatch");
    s = applyServerMessage(s, stateMsg([0, 0, 0.2], false));
    expect(s.lastError).toBeNull();
  });
});
