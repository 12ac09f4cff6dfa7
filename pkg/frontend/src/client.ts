/**
 * Session client: one live connection to the engine's TCP bridge.
 *
 * Transport is abstracted so tests (and a future WebSocket proxy) can plug
 * in; the bundled implementation uses a node socket.  On reconnect the
 * client asks for a full scene refresh instead of trusting stale deltas.
 */

import { type SceneDoc } from "./canonical.js";
import {
  encodeMessage,
  LineSplitter,
  type ClientMessage,
  type FeedbackMessage,
  type ServerMessage,
} from "./protocol.js";
import { SceneStore } from "./sceneStore.js";

export interface Transport {
  send(text: string): void;
  onData(cb: (chunk: string) => void): void;
  onClose(cb: () => void): void;
  close(): void;
}

export async function connectTcp(host: string, port: number): Promise<Transport> {
  const net = await import("node:net");
  const socket = net.createConnection({ host, port });
  await new Promise<void>((resolve, reject) => {
    socket.once("connect", resolve);
    socket.once("error", reject);
  });
  socket.setEncoding("utf-8");
  return {
    send: (text) => socket.write(text),
    onData: (cb) => socket.on("data", cb),
    onClose: (cb) => socket.on("close", cb),
    close: () => socket.destroy(),
  };
}

export class SessionClient {
  readonly store: SceneStore;
  private splitter = new LineSplitter();
  private feedbackListeners: ((fb: FeedbackMessage) => void)[] = [];
  private errorListeners: ((msg: string) => void)[] = [];
  private pendingHash: ((value: string) => void)[] = [];
  private pendingScene: ((doc: SceneDoc) => void)[] = [];
  private pendingRecorded: ((path: string) => void)[] = [];
  lastFeedback: FeedbackMessage | null = null;

  constructor(private transport: Transport, store?: SceneStore) {
    this.store = store ?? new SceneStore();
    transport.onData((chunk) => {
      for (const msg of this.splitter.push(chunk)) this.dispatch(msg);
    });
  }

  private dispatch(msg: ServerMessage): void {
    switch (msg.type) {
      case "delta":
        this.store.applyOps(msg.ops);
        break;
      case "feedback":
        this.lastFeedback = msg;
        for (const cb of this.feedbackListeners) cb(msg);
        break;
      case "hash":
        this.pendingHash.shift()?.(msg.value);
        break;
      case "scene":
        this.pendingScene.shift()?.(msg.data as SceneDoc);
        break;
      case "recorded":
        this.pendingRecorded.shift()?.(msg.path);
        break;
      case "error":
        for (const cb of this.errorListeners) cb(msg.msg);
        break;
    }
  }

  send(msg: ClientMessage): void {
    this.transport.send(encodeMessage(msg));
  }

  onFeedback(cb: (fb: FeedbackMessage) => void): void {
    this.feedbackListeners.push(cb);
  }

  onError(cb: (msg: string) => void): void {
    this.errorListeners.push(cb);
  }

  /** Server-side scene hash, for comparing against store.hash(). */
  requestHash(): Promise<string> {
    return new Promise((resolve) => {
      this.pendingHash.push(resolve);
      this.send({ type: "hash" });
    });
  }

  /** Full scene refresh; replaces the local document. */
  async refresh(): Promise<SceneDoc> {
    const doc = await new Promise<SceneDoc>((resolve) => {
      this.pendingScene.push(resolve);
      this.send({ type: "save_scene" });
    });
    this.store.replace(doc);
    return doc;
  }

  startRecording(path?: string): void {
    this.send({ type: "record", on: true, ...(path ? { path } : {}) });
  }

  stopRecording(): Promise<string> {
    return new Promise((resolve) => {
      this.pendingRecorded.push(resolve);
      this.send({ type: "record", on: false });
    });
  }

  close(): void {
    this.transport.close();
  }
}
