import { beforeEach, describe, expect, it } from "vitest";

import { BoardState, freshEventId, playerId } from "../src/state.js";

describe("playerId", () => {
  beforeEach(() => {
    localStorage.clear();
  });

  it("mints an id once and then sticks with it", () => {
    const first = playerId(localStorage);
    const second = playerId(localStorage);
    expect(first).toBe(second);
    expect(first).toMatch(/^player-[0-9a-f]{16}$/);
  });

  it("respects an id another tab already stored", () => {
    localStorage.setItem("gamekg.player", "player-cafecafecafecafe");
    expect(playerId(localStorage)).toBe("player-cafecafecafecafe");
  });
});

describe("freshEventId", () => {
  it("never repeats", () => {
    const seen = new Set<string>();
    for (let i = 0; i < 200; i += 1) {
      seen.add(freshEventId());
    }
    expect(seen.size).toBe(200);
  });
});

describe("BoardState", () => {
  let state: BoardState;

  beforeEach(() => {
    state = new BoardState();
  });

  it("tracks chip placement", () => {
    expect(state.isPlaced("tok-a")).toBe(false);
    state.place("tok-a", "Person A", 40, 60);
    expect(state.isPlaced("tok-a")).toBe(true);
    expect(state.placed.get("tok-a")).toMatchObject({ x: 40, y: 60 });
  });

  it("creates pending connections with unique event ids", () => {
    const first = state.addConnection("tok-a", "violated", "tok-b", "propose");
    const second = state.addConnection("tok-b", "violated", "tok-a", "propose");
    expect(first.localStatus).toBe("pending");
    expect(first.weight).toBeNull();
    expect(first.eventId).not.toBe(second.eventId);
  });

  it("treats a pending connection as open to block duplicate gestures", () => {
    state.addConnection("tok-a", "violated", "tok-b", "propose");
    expect(state.hasOpenConnection("tok-a", "violated", "tok-b")).toBe(true);
    expect(state.hasOpenConnection("tok-a", "recruited", "tok-b")).toBe(false);
    expect(state.hasOpenConnection("tok-b", "violated", "tok-a")).toBe(false);
  });

  it("acknowledges with the reported weight", () => {
    const connection = state.addConnection("tok-a", "violated", "tok-b", "propose");
    state.acknowledge(connection.id, 1.0);
    expect(connection.localStatus).toBe("acknowledged");
    expect(connection.weight).toBe(1.0);
    expect(state.hasOpenConnection("tok-a", "violated", "tok-b")).toBe(true);
  });

  it("discard removes the optimistic edge entirely", () => {
    const connection = state.addConnection("tok-a", "violated", "tok-b", "propose");
    state.discard(connection.id);
    expect(state.connections).toHaveLength(0);
    expect(state.hasOpenConnection("tok-a", "violated", "tok-b")).toBe(false);
  });

  it("discard of an unknown id is harmless", () => {
    state.addConnection("tok-a", "violated", "tok-b", "propose");
    state.discard("conn-nope");
    expect(state.connections).toHaveLength(1);
  });
});
