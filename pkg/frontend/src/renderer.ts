/**
 * three.js scene graph mirroring the engine's scene document and per-frame
 * feedback affordances: tip sphere (current color and size), snap arrow,
 * ink drop, laser ray, gold or semi-transparent primitive draft, tracked
 * volume wire cube, palm menu ring, and the deletion bin.
 *
 * The graph is renderer-agnostic: tests inspect it headless and the app
 * hands `root` to a WebGLRenderer.
 */

import * as THREE from "three";
import type { SceneDoc } from "./canonical.js";
import type { FeedbackMessage, PrimitiveData, StrokeData } from "./protocol.js";

export const TUBE_RADIAL_SEGMENTS = 12;
export const GOLD = new THREE.Color(0xd4af37);

const UM = 1e-6;

function vUm(v: number[]): THREE.Vector3 {
  return new THREE.Vector3(v[0] * UM, v[1] * UM, v[2] * UM);
}

function colorOf(rgba: number[]): THREE.Color {
  return new THREE.Color(rgba[0] / 255, rgba[1] / 255, rgba[2] / 255);
}

/**
 * Sweep a circle along the polyline with parallel-transport frames:
 * n*k + 2 vertices (k ring vertices per sample plus two cap centers).
 */
export function buildTubeGeometry(
  points: THREE.Vector3[],
  radius: number,
  k: number = TUBE_RADIAL_SEGMENTS,
): THREE.BufferGeometry {
  const n = points.length;
  const verts: THREE.Vector3[] = [];
  const tris: number[] = [];
  let tangent = new THREE.Vector3().subVectors(points[1], points[0]).normalize();
  let normal = new THREE.Vector3(0, 1, 0);
  if (Math.abs(normal.dot(tangent)) > 0.9) normal = new THREE.Vector3(1, 0, 0);
  normal.sub(tangent.clone().multiplyScalar(normal.dot(tangent))).normalize();
  for (let i = 0; i < n; i++) {
    if (i > 0) {
      const next = new THREE.Vector3().subVectors(points[i], points[i - 1]);
      if (next.lengthSq() > 1e-18) {
        const newTangent = next.clone().normalize();
        const q = new THREE.Quaternion().setFromUnitVectors(tangent, newTangent);
        normal.applyQuaternion(q).normalize();
        tangent = newTangent;
      }
    }
    const binormal = new THREE.Vector3().crossVectors(tangent, normal);
    for (let j = 0; j < k; j++) {
      const a = (2 * Math.PI * j) / k;
      verts.push(
        points[i]
          .clone()
          .addScaledVector(normal, radius * Math.cos(a))
          .addScaledVector(binormal, radius * Math.sin(a)),
      );
    }
  }
  for (let i = 0; i < n - 1; i++) {
    for (let j = 0; j < k; j++) {
      const a = i * k + j;
      const b = i * k + ((j + 1) % k);
      const c = (i + 1) * k + j;
      const d = (i + 1) * k + ((j + 1) % k);
      tris.push(a, c, b, b, c, d);
    }
  }
  const startCap = verts.length;
  verts.push(points[0].clone());
  const endCap = verts.length;
  verts.push(points[n - 1].clone());
  for (let j = 0; j < k; j++) {
    tris.push(startCap, j, (j + 1) % k);
    const base = (n - 1) * k;
    tris.push(endCap, base + ((j + 1) % k), base + j);
  }
  const geo = new THREE.BufferGeometry();
  const pos = new Float32Array(verts.length * 3);
  verts.forEach((v, i) => v.toArray(pos, i * 3));
  geo.setAttribute("position", new THREE.BufferAttribute(pos, 3));
  geo.setIndex(tris);
  geo.computeVertexNormals();
  return geo;
}

function primitiveGeometry(kind: string): THREE.BufferGeometry {
  if (kind === "sphere") return new THREE.SphereGeometry(0.5, 24, 16);
  if (kind === "cylinder") return new THREE.CylinderGeometry(0.5, 0.5, 1, 24);
  return new THREE.BoxGeometry(1, 1, 1);
}

export class StudioRenderer {
  readonly root = new THREE.Scene();
  readonly strokesGroup = new THREE.Group();
  readonly primitivesGroup = new THREE.Group();
  readonly tipSphere: THREE.Mesh;
  readonly arrow: THREE.ArrowHelper;
  readonly inkDrop: THREE.Mesh;
  readonly laser: THREE.Line;
  readonly wireCube: THREE.LineSegments;
  readonly bin: THREE.Group;
  readonly draftMesh: THREE.Mesh;
  readonly menuGroup = new THREE.Group();
  readonly planeGrid = new THREE.Group();
  private strokeIds = new Set<number>();

  constructor() {
    this.strokesGroup.name = "strokes";
    this.primitivesGroup.name = "primitives";
    this.root.add(this.strokesGroup, this.primitivesGroup);

    this.tipSphere = new THREE.Mesh(
      new THREE.SphereGeometry(1, 16, 12),
      new THREE.MeshStandardMaterial({ color: 0xffffff }),
    );
    this.tipSphere.name = "tip";

    this.arrow = new THREE.ArrowHelper(
      new THREE.Vector3(0, -1, 0),
      new THREE.Vector3(),
      0.1,
      0x26c6da,
    );
    this.arrow.name = "arrow";
    this.arrow.visible = false;

    this.inkDrop = new THREE.Mesh(
      new THREE.SphereGeometry(0.006, 8, 6),
      new THREE.MeshBasicMaterial({ color: 0x26c6da }),
    );
    this.inkDrop.name = "ink_drop";
    this.inkDrop.visible = false;

    this.laser = new THREE.Line(
      new THREE.BufferGeometry().setFromPoints([
        new THREE.Vector3(),
        new THREE.Vector3(0, 0, -1),
      ]),
      new THREE.LineBasicMaterial({ color: 0xff3333 }),
    );
    this.laser.name = "laser";
    this.laser.visible = false;

    this.wireCube = new THREE.LineSegments(
      new THREE.EdgesGeometry(new THREE.BoxGeometry(1, 1, 1)),
      new THREE.LineBasicMaterial({ color: 0x888888 }),
    );
    this.wireCube.name = "wire_cube";

    this.bin = new THREE.Group();
    this.bin.name = "bin";
    const binBody = new THREE.Mesh(
      new THREE.CylinderGeometry(0.06, 0.05, 0.09, 16, 1, true),
      new THREE.MeshStandardMaterial({ color: 0x555555, side: THREE.DoubleSide }),
    );
    this.bin.add(binBody);
    this.bin.visible = false;

    this.draftMesh = new THREE.Mesh(
      new THREE.BoxGeometry(1, 1, 1),
      new THREE.MeshStandardMaterial({
        color: 0xffffff,
        transparent: true,
        opacity: 0.4,
      }),
    );
    this.draftMesh.name = "draft";
    this.draftMesh.visible = false;

    this.menuGroup.name = "menu";
    this.menuGroup.visible = false;
    this.planeGrid.name = "plane_grid";
    this.planeGrid.visible = false;

    this.root.add(
      this.tipSphere,
      this.arrow,
      this.inkDrop,
      this.laser,
      this.wireCube,
      this.bin,
      this.draftMesh,
      this.menuGroup,
      this.planeGrid,
      new THREE.AmbientLight(0xffffff, 0.7),
      new THREE.DirectionalLight(0xffffff, 1.2),
    );
  }

  /** Rebuild entity meshes from the scene document. */
  syncScene(doc: SceneDoc): void {
    const wanted = new Set(doc.strokes.map((s) => s.id));
    for (const child of [...this.strokesGroup.children]) {
      if (!wanted.has(child.userData.id)) this.strokesGroup.remove(child);
    }
    for (const stroke of doc.strokes) {
      if (!this.strokeIds.has(stroke.id)) this.addStroke(stroke);
    }
    this.strokeIds = wanted;

    this.primitivesGroup.clear();
    for (const prim of doc.primitives) this.addPrimitive(prim);

    this.planeGrid.clear();
    this.planeGrid.visible = doc.proxy_plane !== null;
    if (doc.proxy_plane) {
      const pl = doc.proxy_plane;
      const w = (pl.half_u_um * 2) * UM;
      const h = (pl.half_v_um * 2) * UM;
      const cell = pl.grid_cell_um * UM;
      const grid = new THREE.GridHelper(Math.max(w, h), Math.round(Math.max(w, h) / cell));
      const holder = new THREE.Group();
      holder.add(grid);
      holder.position.copy(vUm(pl.pos_um));
      const q = pl.quat_q7;
      holder.quaternion.set(q[0] * 1e-7, q[1] * 1e-7, q[2] * 1e-7, q[3] * 1e-7);
      this.planeGrid.add(holder);
    }
  }

  private addStroke(stroke: StrokeData): void {
    const pts = stroke.samples_um.map(vUm);
    const mesh = new THREE.Mesh(
      buildTubeGeometry(pts, stroke.radius_um * UM),
      new THREE.MeshStandardMaterial({ color: colorOf(stroke.color) }),
    );
    mesh.userData.id = stroke.id;
    mesh.name = `stroke_${stroke.id}`;
    this.strokesGroup.add(mesh);
  }

  private addPrimitive(prim: PrimitiveData): void {
    const mesh = new THREE.Mesh(
      primitiveGeometry(prim.kind),
      new THREE.MeshStandardMaterial({ color: colorOf(prim.color) }),
    );
    mesh.position.copy(vUm(prim.pos_um));
    const q = prim.quat_q7;
    mesh.quaternion.set(q[0] * 1e-7, q[1] * 1e-7, q[2] * 1e-7, q[3] * 1e-7);
    mesh.scale.copy(vUm(prim.extents_um));
    mesh.userData.id = prim.id;
    mesh.name = `prim_${prim.id}`;
    this.primitivesGroup.add(mesh);
  }

  /** Reflect one frame's feedback affordances. */
  applyFeedback(fb: FeedbackMessage): void {
    this.tipSphere.position.set(
      fb.tip_position[0],
      fb.tip_position[1],
      fb.tip_position[2],
    );
    (this.tipSphere.material as THREE.MeshStandardMaterial).color =
      colorOf(fb.tip_color);
    this.tipSphere.scale.setScalar(fb.tip_radius);

    this.arrow.visible = fb.arrow;
    this.arrow.position.copy(this.tipSphere.position);

    this.inkDrop.visible = fb.ink_drop;
    this.inkDrop.position.copy(this.tipSphere.position);

    this.laser.visible = fb.laser_ray !== null;
    if (fb.laser_ray) {
      this.laser.geometry.setFromPoints([
        new THREE.Vector3(...(fb.laser_ray[0] as [number, number, number])),
        new THREE.Vector3(...(fb.laser_ray[1] as [number, number, number])),
      ]);
    }

    this.wireCube.scale.set(fb.wire_cube[0], fb.wire_cube[1], fb.wire_cube[2]);

    this.bin.visible = fb.bin_shown;
    if (fb.bin_shown && fb.menu_center) {
      this.bin.position.set(
        fb.menu_center[0],
        fb.menu_center[1],
        fb.menu_center[2],
      );
    }

    this.draftMesh.visible = fb.draft !== null;
    if (fb.draft) {
      this.draftMesh.geometry.dispose();
      this.draftMesh.geometry = primitiveGeometry(fb.draft.kind);
      this.draftMesh.position.set(
        fb.draft.center[0],
        fb.draft.center[1],
        fb.draft.center[2],
      );
      this.draftMesh.scale.set(
        fb.draft.extents[0],
        fb.draft.extents[1],
        fb.draft.extents[2],
      );
      const mat = this.draftMesh.material as THREE.MeshStandardMaterial;
      if (fb.draft_gold) {
        mat.color.copy(GOLD);
        mat.opacity = 1.0;
      } else {
        mat.color.set(0xffffff);
        mat.opacity = 0.4;
      }
    }

    this.menuGroup.visible = fb.menu_buttons.length > 0;
    this.menuGroup.clear();
    for (const [name, pos] of fb.menu_buttons) {
      const btn = new THREE.Mesh(
        new THREE.SphereGeometry(0.012, 8, 6),
        new THREE.MeshStandardMaterial({
          color: name === fb.menu_hover ? 0xffff66 : 0xcccccc,
        }),
      );
      btn.name = `menu_${name}`;
      btn.position.set(pos[0], pos[1], pos[2]);
      this.menuGroup.add(btn);
    }
  }
}
