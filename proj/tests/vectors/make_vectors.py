#!/usr/bin/env python3
"""Regenerates the golden telegram byte vectors from the wire-format spec
(docs/wire-format.md). Hand-packed on purpose: these files are the reference
the C++ codec is checked against, so they must not be produced by it."""

import math
import pathlib
import struct

HERE = pathlib.Path(__file__).parent


def frame(msg_id: int, payload: bytes) -> bytes:
    return struct.pack("<HH", msg_id, len(payload)) + payload


def nav_data(t, lat, lon, depth, roll, pitch, yaw, speed, hog, gps_fix):
    return frame(0x0001, struct.pack(
        "<10d", t, lat, lon, depth, roll, pitch, yaw, speed, hog, gps_fix))


def llc_command(mode):
    return frame(0x0002, struct.pack("<H", mode))


def llc_setpoint(heading, depth, speed):
    return frame(0x0003, struct.pack("<3d", heading, depth, speed))


def llc_setpoints_cwolf(pwm):
    return frame(0x0004, struct.pack("<6h", *pwm))


def llc_status(motors, mode_echo):
    payload = b"".join(struct.pack("<fB", rpm, enabled) for rpm, enabled in motors)
    return frame(0x0005, payload + struct.pack("<H", mode_echo))


def llc_error(code, message):
    data = message.encode("utf-8")
    return frame(0x0006, struct.pack("<HB", code, len(data)) + data)


VECTORS = {
    "nav_data.bin": nav_data(
        12.3, 60.391234, 5.322345, 7.5, 0.0, -0.1, 0.75, 1.5, 42.25, 0.0),
    "nav_data_nan_hog.bin": nav_data(
        120.0, 60.3901, 5.3188, 0.1, 0.0, 0.02, -2.5, 1.2, math.nan, 1.0),
    "llc_command_nocontrol.bin": llc_command(0),
    "llc_command_direct.bin": llc_command(2),
    "llc_setpoint.bin": llc_setpoint(0.75, 5.0, 1.2),
    "llc_setpoints_cwolf.bin": llc_setpoints_cwolf([236, 236, -150, 150, 0, -1000]),
    "llc_status.bin": llc_status(
        [(1200.5, 1), (1200.5, 1), (0.0, 1), (0.0, 1), (-300.25, 1), (10.0, 0)], 2),
    "llc_error.bin": llc_error(7, "depth sensor timeout"),
}

if __name__ == "__main__":
    for name, data in VECTORS.items():
        (HERE / name).write_bytes(data)
        print(f"{name}: {len(data)} bytes")
