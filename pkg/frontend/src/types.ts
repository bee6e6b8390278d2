export interface TelemetryMsg {
  altitude_m: number;
  latitude_deg: number;
  longitude_deg: number;
  ground_speed_mps: number;
  accel_mps2: [number, number, number];
  gyro_radps: [number, number, number];
  timestamp_us: number;
}

export interface MulsemediaMsg {
  ts: number;
  thermal: Record<string, number>;
  vibro: Record<string, number>;
}

export interface MetricsMsg {
  uplink_bps?: number | null;
  downlink_bps?: number | null;
  text_to_code_ms?: number | null;
  mqtt_ms?: number | null;
  code_rendering_ms?: number | null;
  mulse?: MulsemediaMsg | null;
}

export interface PilotCommand {
  axes: [number, number, number, number]; // roll, pitch, yaw, throttle in [-1, 1]
  buttons: Record<string, boolean>;
  timestamp: number;
}

export interface CameraPose {
  x: number; // east, meters
  y: number; // up, meters
  z: number; // south, meters (negative north, matching the scene axis)
}

export interface RenderReport {
  node_count: number;
  prep_ms: number;
  placeholders: number;
  generation: number;
}

export function topicCode(stream: string): string {
  return `semcast/${stream}/code`;
}
export function topicTelemetry(stream: string): string {
  return `semcast/${stream}/telemetry`;
}
export function topicMulsemedia(stream: string): string {
  return `semcast/${stream}/mulse`;
}
export function topicCommand(stream: string): string {
  return `semcast/${stream}/cmd`;
}
export function topicMetrics(stream: string): string {
  return `semcast/${stream}/metrics`;
}
