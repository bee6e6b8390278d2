import { describe, expect, it } from "vitest";

import { CameraTracker, poseFromTelemetry } from "../src/camera.js";
import type { TelemetryMsg } from "../src/types.js";

function telemetry(partial: Partial<TelemetryMsg>): TelemetryMsg {
  return {
    altitude_m: 30,
    latitude_deg: 60.1866,
    longitude_deg: 24.8295,
    ground_speed_mps: 0,
    accel_mps2: [0, 0, 0],
    gyro_radps: [0, 0, 0],
    timestamp_us: 0,
    ...partial,
  };
}

describe("CameraTracker", () => {
  it("pose equals the pure function of the last telemetry fixture", () => {
    const tracker = new CameraTracker();
    const fixtures = Array.from({ length: 10 }, (_, i) =>
      telemetry({
        timestamp_us: (i + 1) * 40_000,
        latitude_deg: 60.1866 + i * 0.00001,
        longitude_deg: 24.8295 + i * 0.00002,
        altitude_m: 30 + i * 0.5,
      }),
    );
    for (const sample of fixtures) tracker.update(sample);
    const expected = poseFromTelemetry(fixtures[0], fixtures[fixtures.length - 1]);
    expect(tracker.pose).toEqual(expected);
    expect(tracker.lastTimestampUs).toBe(400_000);
  });

  it("first sample becomes the local origin", () => {
    const tracker = new CameraTracker();
    const pose = tracker.update(telemetry({ timestamp_us: 1 }));
    expect(pose).toEqual({ x: 0, y: 0, z: -0 });
  });

  it("ignores out-of-order telemetry", () => {
    const tracker = new CameraTracker();
    tracker.update(telemetry({ timestamp_us: 100, altitude_m: 30 }));
    tracker.update(telemetry({ timestamp_us: 200, altitude_m: 40 }));
    const before = tracker.pose;
    tracker.update(telemetry({ timestamp_us: 150, altitude_m: 99 }));
    expect(tracker.pose).toEqual(before);
  });

  it("writes the pose onto the camera rig element only from telemetry", () => {
    const rig = document.createElement("a-entity");
    const tracker = new CameraTracker(rig);
    tracker.update(telemetry({ timestamp_us: 1 }));
    tracker.update(telemetry({ timestamp_us: 2, altitude_m: 42.5 }));
    expect(rig.getAttribute("position")).toBe("0.00 12.50 0.00");
  });

  it("maps north and east displacement onto scene axes", () => {
    const origin = telemetry({ timestamp_us: 1 });
    const moved = telemetry({
      timestamp_us: 2,
      latitude_deg: origin.latitude_deg + 0.0001, // ~11.06 m north
      longitude_deg: origin.longitude_deg + 0.0001, // ~5.54 m east at 60N
    });
    const pose = poseFromTelemetry(origin, moved);
    expect(pose.z).toBeCloseTo(-11.0574, 3);
    expect(pose.x).toBeCloseTo(11.132 * Math.cos((60.18665 * Math.PI) / 180), 3);
  });
});
