/**
 * three.js view layer: renders SceneBuffers verbatim. No robot math lives
 * here; geometry arrives as flat vertex buffers from scene.ts, so the view
 * cannot invent a pose the server never sent.
 */
import * as THREE from "three";
import type { SceneBuffers } from "./scene.js";
import { cameraPosition, type OrbitPose } from "./camera.js";
import type { Ray } from "./surface.js";
import type { Vec3 } from "./protocol.js";

const COLORS = {
  backbone: 0x3070c0,
  recorded: 0x30b050, // green, matches the recorded-demo convention
  predicted: 0xe060a0, // pink, matches the prediction convention
  environment: 0x808080,
  tip: 0xff9020,
  target: 0xf0e040,
};

export class TeleopView {
  readonly renderer: THREE.WebGLRenderer;
  readonly scene = new THREE.Scene();
  readonly camera: THREE.PerspectiveCamera;
  private backbone: THREE.Line;
  private recorded: THREE.Line;
  private predicted: THREE.Line;
  private envLines: THREE.LineSegments;
  private envMesh: THREE.Mesh;
  private tip: THREE.Mesh;
  private target: THREE.Mesh;
  private raycaster = new THREE.Raycaster();

  constructor(canvas: HTMLCanvasElement) {
    this.renderer = new THREE.WebGLRenderer({ canvas, antialias: true });
    this.camera = new THREE.PerspectiveCamera(45, canvas.width / canvas.height, 0.01, 20);
    this.camera.up.set(0, 0, 1); // workspace up axis is +z
    this.scene.background = new THREE.Color(0x101418);
    this.scene.add(new THREE.AmbientLight(0xffffff, 0.7));
    const sun = new THREE.DirectionalLight(0xffffff, 0.8);
    sun.position.set(1, -1, 2);
    this.scene.add(sun);

    const line = (color: number, width = 1) =>
      new THREE.Line(
        new THREE.BufferGeometry(),
        new THREE.LineBasicMaterial({ color, linewidth: width }),
      );
    this.backbone = line(COLORS.backbone, 3);
    this.recorded = line(COLORS.recorded);
    this.predicted = line(COLORS.predicted);
    this.envLines = new THREE.LineSegments(
      new THREE.BufferGeometry(),
      new THREE.LineBasicMaterial({ color: COLORS.environment }),
    );
    this.envMesh = new THREE.Mesh(
      new THREE.BufferGeometry(),
      new THREE.MeshStandardMaterial({
        color: COLORS.environment,
        transparent: true,
        opacity: 0.45,
        side: THREE.DoubleSide,
      }),
    );
    const marker = (color: number, r: number) =>
      new THREE.Mesh(
        new THREE.SphereGeometry(r, 16, 12),
        new THREE.MeshStandardMaterial({ color }),
      );
    this.tip = marker(COLORS.tip, 0.003);
    this.target = marker(COLORS.target, 0.002);
    this.scene.add(this.backbone, this.recorded, this.predicted,
                   this.envLines, this.envMesh, this.tip, this.target);
  }

  update(buffers: SceneBuffers): void {
    const setPositions = (obj: THREE.Line | THREE.LineSegments | THREE.Mesh, data: Float32Array) => {
      obj.geometry.setAttribute("position", new THREE.BufferAttribute(data, 3));
      obj.geometry.computeBoundingSphere();
    };
    setPositions(this.backbone, buffers.backbone);
    setPositions(this.recorded, buffers.recordedPath);
    setPositions(this.predicted, buffers.predictedPath);
    setPositions(buffers.environmentIsMesh ? this.envMesh : this.envLines, buffers.environment);
    if (buffers.environmentIsMesh) {
      this.envMesh.geometry.computeVertexNormals();
      this.envLines.geometry.setAttribute("position", new THREE.BufferAttribute(new Float32Array(0), 3));
    } else {
      this.envMesh.geometry.setAttribute("position", new THREE.BufferAttribute(new Float32Array(0), 3));
    }
    this.tip.visible = buffers.tip !== null;
    if (buffers.tip) this.tip.position.set(...buffers.tip);
    this.target.visible = buffers.target !== null;
    if (buffers.target) this.target.position.set(...buffers.target);
  }

  applyOrbit(pose: OrbitPose): void {
    this.camera.position.set(...cameraPosition(pose));
    this.camera.lookAt(...pose.pivot);
  }

  /** Pointer ray in world space from normalized device coordinates. */
  pointerRay(ndcX: number, ndcY: number): Ray {
    this.raycaster.setFromCamera(new THREE.Vector2(ndcX, ndcY), this.camera);
    const o = this.raycaster.ray.origin;
    const d = this.raycaster.ray.direction;
    return { origin: [o.x, o.y, o.z] as Vec3, direction: [d.x, d.y, d.z] as Vec3 };
  }

  render(): void {
    this.renderer.render(this.scene, this.camera);
  }
}
