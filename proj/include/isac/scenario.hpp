#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "isac/common.hpp"

namespace isac {

/// Kinematic envelope for simulated pedestrians. Acceleration and turn rate
/// bound the underlying 2-D walk per step; the range window bounds the
/// radial distance from the sensor.
struct KinematicConstraints {
  double max_speed_mps = 5.6;
  double min_range_m = 18.0;
  double max_range_m = 54.0;
  double max_turn_rate_radps = 1.0;
  double max_accel_mps2 = 1.0;
};

/// Radial state of one object at one frame.
struct ObjectState {
  double range_m = 0.0;
  double speed_mps = 0.0;
};

/// One object's lifetime: states[k] is the state at frame birth_frame + k.
struct Trajectory {
  int id = 0;
  int birth_frame = 0;
  std::vector<ObjectState> states;

  int death_frame() const {
    return birth_frame + static_cast<int>(states.size());
  }
  bool alive_at(int frame) const {
    return frame >= birth_frame && frame < death_frame();
  }
  const ObjectState& state_at(int frame) const {
    return states.at(static_cast<std::size_t>(frame - birth_frame));
  }
};

struct Scenario {
  std::string label;
  double dt_s = 0.01;
  double duration_s = 30.0;
  std::vector<Trajectory> trajectories;

  int frame_count() const {
    return static_cast<int>(duration_s / dt_s + 0.5);
  }
  std::vector<const Trajectory*> alive_at(int frame) const;
  int cardinality_at(int frame) const;
};

/// Random pedestrian walk projected onto (range, radial speed).
///
/// The walk lives in the plane with the sensor at the origin. Each step may
/// change speed by at most max_accel*dt and heading by at most
/// max_turn_rate*dt; a steering term keeps the object inside the range
/// annulus, with specular reflection as a fallback when steering loses the
/// race. The reported radial speed is the forward difference of range, so
/// speed_mps[k] == (range_m[k+1] - range_m[k]) / dt holds exactly.
Trajectory generate_random_walk(const KinematicConstraints& limits, int frames,
                                double dt_s, std::uint64_t seed,
                                int birth_frame = 0, int id = 0);

/// True when the two objects pass through (nearly) the same range/speed cell
/// at the given frame: |dr| <= 0.5 m and |dv| <= 0.3 m/s.
bool objects_cross(const Trajectory& a, const Trajectory& b, int frame);

/// Benchmark scene presets, all 30 s at dt = 10 ms:
///   1: two objects, well separated in range throughout.
///   2: two objects whose paths cross around t = 8 s.
///   3: six objects with staggered births/deaths and several crossings.
///   4: six objects that all pass through the same range/speed cell near
///      t = 12 s.
Scenario make_preset(int preset, std::uint64_t seed,
                     const KinematicConstraints& limits = {});

/// Frames at which at least one pair of alive objects crosses.
std::vector<int> crossing_frames(const Scenario& scenario);

}  // namespace isac
