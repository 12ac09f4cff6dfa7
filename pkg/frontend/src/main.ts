/**
 * Studio app wiring: connect a transport, pump 60 Hz emulated frames, and
 * keep the renderer in sync with deltas and feedback.
 *
 * The browser build needs a transport that bridges to the TCP session
 * endpoint (e.g. a WebSocket proxy); under node the TCP transport from
 * client.ts connects directly.
 */

import * as THREE from "three";
import { SessionClient, type Transport } from "./client.js";
import { InputEmulator } from "./input.js";
import { StudioRenderer } from "./renderer.js";

export interface StudioOptions {
  canvas?: HTMLCanvasElement;
  frameRate?: number;
}

export class Studio {
  readonly client: SessionClient;
  readonly emulator = new InputEmulator();
  readonly renderer = new StudioRenderer();
  private timer: ReturnType<typeof setInterval> | null = null;

  constructor(transport: Transport) {
    this.client = new SessionClient(transport);
    this.client.onFeedback((fb) => this.renderer.applyFeedback(fb));
    this.client.store.onChange(() =>
      this.renderer.syncScene(this.client.store.doc),
    );
  }

  /** Start streaming emulated frames at a fixed rate. */
  start(frameRate = 60): void {
    this.stop();
    this.timer = setInterval(() => {
      this.client.send(this.emulator.nextFrame());
    }, 1000 / frameRate);
  }

  stop(): void {
    if (this.timer !== null) clearInterval(this.timer);
    this.timer = null;
  }

  attachDom(canvas: HTMLCanvasElement): void {
    const gl = new THREE.WebGLRenderer({ canvas, antialias: true });
    const camera = new THREE.PerspectiveCamera(
      60,
      canvas.clientWidth / canvas.clientHeight,
      0.01,
      100,
    );
    camera.position.set(0, 1.7, 1.5);
    camera.lookAt(0, 1.1, -0.6);

    const raycaster = new THREE.Raycaster();
    canvas.addEventListener("pointermove", (ev) => {
      const r = canvas.getBoundingClientRect();
      const ndc = new THREE.Vector2(
        ((ev.clientX - r.left) / r.width) * 2 - 1,
        -((ev.clientY - r.top) / r.height) * 2 + 1,
      );
      raycaster.setFromCamera(ndc, camera);
      const o = raycaster.ray.origin;
      const d = raycaster.ray.direction;
      this.emulator.setMouseRay([o.x, o.y, o.z], [d.x, d.y, d.z]);
    });
    canvas.addEventListener("pointerdown", () => this.emulator.mouseDown());
    canvas.addEventListener("pointerup", () => this.emulator.mouseUp());
    window.addEventListener("keydown", (ev) => this.emulator.keyDown(ev.key));
    window.addEventListener("keyup", (ev) => this.emulator.keyUp(ev.key));

    const tick = () => {
      gl.render(this.renderer.root, camera);
      requestAnimationFrame(tick);
    };
    tick();
  }

  async close(): Promise<void> {
    this.stop();
    this.client.close();
  }
}
