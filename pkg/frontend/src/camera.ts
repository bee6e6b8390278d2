// Virtual camera follows the vehicle: pose is a pure function of the first
// (origin) and latest telemetry samples, local east/up/north meters.

import type { CameraPose, TelemetryMsg } from "./types.js";

const METERS_PER_DEG_LAT = 110574.0;
const METERS_PER_DEG_LON_EQUATOR = 111320.0;

export function poseFromTelemetry(origin: TelemetryMsg, latest: TelemetryMsg): CameraPose {
  const midLatRad = ((origin.latitude_deg + latest.latitude_deg) / 2) * (Math.PI / 180);
  const east =
    (latest.longitude_deg - origin.longitude_deg) *
    METERS_PER_DEG_LON_EQUATOR *
    Math.cos(midLatRad);
  const north = (latest.latitude_deg - origin.latitude_deg) * METERS_PER_DEG_LAT;
  const up = latest.altitude_m - origin.altitude_m;
  return { x: east, y: up, z: -north };
}

export class CameraTracker {
  private origin: TelemetryMsg | null = null;
  pose: CameraPose = { x: 0, y: 0, z: 0 };
  lastTimestampUs = -1;

  constructor(private rig?: Element) {}

  /** Feed one telemetry message; stale (out of order) samples are ignored. */
  update(telemetry: TelemetryMsg): CameraPose {
    if (telemetry.timestamp_us <= this.lastTimestampUs) {
      return this.pose;
    }
    this.lastTimestampUs = telemetry.timestamp_us;
    if (this.origin === null) {
      this.origin = telemetry;
    }
    this.pose = poseFromTelemetry(this.origin, telemetry);
    this.rig?.setAttribute(
      "position",
      `${this.pose.x.toFixed(2)} ${this.pose.y.toFixed(2)} ${this.pose.z.toFixed(2)}`,
    );
    return this.pose;
  }
}
