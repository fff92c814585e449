#include "isac/scenario.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace isac {

namespace {

constexpr double kPi = std::numbers::pi;

double wrap_angle(double a) { return std::remainder(a, 2.0 * kPi); }

struct Walk2D {
  Eigen::Vector2d pos{0.0, 0.0};
  double speed = 0.0;
  double heading = 0.0;
};

void validate_limits(const KinematicConstraints& lim) {
  if (!(lim.min_range_m > 0.0) || !(lim.max_range_m > lim.min_range_m) ||
      !(lim.max_speed_mps > 0.0) || !(lim.max_turn_rate_radps > 0.0) ||
      !(lim.max_accel_mps2 > 0.0)) {
    throw std::invalid_argument("kinematic constraints are not a valid envelope");
  }
}

/// Advance the walk by one step of dt. Random wobble on speed and heading,
/// overridden by boundary steering: inside a speed-dependent margin of the
/// range annulus the heading turns toward the tangent (blended inward or
/// outward as the boundary nears). If the step still exits the annulus, the
/// position is mirrored across the boundary circle and the velocity is
/// reflected about the local tangent.
void step_walk(Walk2D& w, const KinematicConstraints& lim, double dt,
               std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  double dv = u(rng) * lim.max_accel_mps2 * dt;
  double wobble = u(rng) * lim.max_turn_rate_radps * dt;
  w.speed = std::clamp(w.speed + dv, 0.0, lim.max_speed_mps);

  double max_turn = lim.max_turn_rate_radps * dt;
  double r = w.pos.norm();
  double bearing = std::atan2(w.pos.y(), w.pos.x());
  double rel = wrap_angle(w.heading - bearing);
  double radial_frac = std::cos(rel);
  double margin = 1.25 * w.speed / lim.max_turn_rate_radps + 0.5;
  double to_outer = lim.max_range_m - r;
  double to_inner = r - lim.min_range_m;

  double turn = wobble;
  double tangent_sign = std::sin(rel) >= 0.0 ? 1.0 : -1.0;
  if (to_outer < margin && radial_frac > 0.0) {
    double extra = (1.0 - std::max(to_outer, 0.0) / margin) * (kPi / 4.0);
    double desired = bearing + tangent_sign * (kPi / 2.0 + extra);
    turn = std::clamp(wrap_angle(desired - w.heading), -max_turn, max_turn);
  } else if (to_inner < margin && radial_frac < 0.0) {
    double extra = (1.0 - std::max(to_inner, 0.0) / margin) * (kPi / 4.0);
    double desired = bearing + tangent_sign * (kPi / 2.0 - extra);
    turn = std::clamp(wrap_angle(desired - w.heading), -max_turn, max_turn);
  }
  w.heading = wrap_angle(w.heading + turn);
  w.pos += w.speed * dt *
           Eigen::Vector2d(std::cos(w.heading), std::sin(w.heading));

  double r2 = w.pos.norm();
  double bound = 0.0;
  if (r2 > lim.max_range_m) {
    bound = lim.max_range_m;
  } else if (r2 < lim.min_range_m) {
    bound = lim.min_range_m;
  }
  if (bound > 0.0) {
    double mirrored = std::clamp(2.0 * bound - r2, lim.min_range_m, lim.max_range_m);
    double b2 = std::atan2(w.pos.y(), w.pos.x());
    w.pos *= mirrored / r2;
    w.heading = wrap_angle(2.0 * b2 + kPi - w.heading);
  }
}

/// Positions of an n_steps walk starting from `start`; returns n_steps + 1
/// points including the start.
std::vector<Eigen::Vector2d> walk_from(const KinematicConstraints& lim,
                                       int n_steps, double dt, Walk2D start,
                                       std::mt19937_64& rng) {
  std::vector<Eigen::Vector2d> pts;
  pts.reserve(static_cast<std::size_t>(n_steps) + 1);
  pts.push_back(start.pos);
  for (int k = 0; k < n_steps; ++k) {
    step_walk(start, lim, dt, rng);
    pts.push_back(start.pos);
  }
  return pts;
}

Trajectory positions_to_trajectory(const std::vector<Eigen::Vector2d>& pts,
                                   double dt, int birth_frame, int id) {
  Trajectory tr;
  tr.id = id;
  tr.birth_frame = birth_frame;
  int n_states = static_cast<int>(pts.size()) - 1;
  tr.states.resize(static_cast<std::size_t>(n_states));
  double prev = pts[0].norm();
  for (int k = 0; k < n_states; ++k) {
    double next = pts[static_cast<std::size_t>(k) + 1].norm();
    tr.states[static_cast<std::size_t>(k)] = {prev, (next - prev) / dt};
    prev = next;
  }
  return tr;
}

/// Walk passing through `at` exactly at local frame k_local: the backward
/// half is a forward walk launched with reversed velocity and then played
/// in reverse, which keeps the per-step speed and turn bounds intact and
/// makes the junction seamless.
std::vector<Eigen::Vector2d> stitched_positions(const KinematicConstraints& lim,
                                                int n_states, int k_local,
                                                double dt, const Walk2D& at,
                                                std::mt19937_64& rng) {
  Walk2D back = at;
  back.heading = wrap_angle(at.heading + kPi);
  auto b = walk_from(lim, k_local, dt, back, rng);
  auto f = walk_from(lim, n_states + 1 - k_local - 1, dt, at, rng);
  std::vector<Eigen::Vector2d> pts;
  pts.reserve(static_cast<std::size_t>(n_states) + 1);
  for (int k = k_local; k >= 1; --k) pts.push_back(b[static_cast<std::size_t>(k)]);
  pts.insert(pts.end(), f.begin(), f.end());
  return pts;
}

struct WaypointSpec {
  double range_m;
  double bearing_rad;
  double radial_speed_mps;
  double tangent_angle_rad;  // signed angle between velocity and radial axis
  int frame;                 // scenario frame of passage
  int birth;
  int death;
  int id;
};

/// A deliberate crossing: all members pass through nearly the same
/// range/speed cell at the same frame. Pair events additionally demand that
/// the members pull apart on both sides of the crossing and do not cross
/// again far from it; the pile-up preset skips those demands.
struct EventSpec {
  std::vector<WaypointSpec> members;
  bool require_resolution = true;
};

Trajectory build_through_waypoint(const KinematicConstraints& lim,
                                  const WaypointSpec& wp, double dt,
                                  std::mt19937_64& rng) {
  Walk2D at;
  at.pos = wp.range_m * Eigen::Vector2d(std::cos(wp.bearing_rad),
                                        std::sin(wp.bearing_rad));
  at.speed = std::abs(wp.radial_speed_mps) / std::cos(wp.tangent_angle_rad);
  double rel = wp.tangent_angle_rad;
  if (wp.radial_speed_mps < 0.0) rel = kPi - rel;
  at.heading = wrap_angle(wp.bearing_rad + rel);
  int n_states = wp.death - wp.birth;
  auto pts = stitched_positions(lim, n_states, wp.frame - wp.birth, dt, at, rng);
  return positions_to_trajectory(pts, dt, wp.birth, wp.id);
}

double range_gap(const Trajectory& a, const Trajectory& b, int frame) {
  if (!a.alive_at(frame) || !b.alive_at(frame)) return 1e9;
  return std::abs(a.state_at(frame).range_m - b.state_at(frame).range_m);
}

bool event_ok(const std::vector<Trajectory>& members, const EventSpec& spec) {
  const int k = spec.members.front().frame;
  for (std::size_t i = 0; i + 1 < members.size(); ++i) {
    for (std::size_t j = i + 1; j < members.size(); ++j) {
      const auto& a = members[i];
      const auto& b = members[j];
      if (!objects_cross(a, b, k)) return false;
      if (spec.require_resolution) {
        if (range_gap(a, b, k - 400) < 0.8 || range_gap(a, b, k + 400) < 0.8 ||
            range_gap(a, b, k - 700) < 1.4 || range_gap(a, b, k + 700) < 1.4) {
          return false;
        }
      }
    }
  }
  return true;
}

Scenario make_preset1(std::uint64_t seed, const KinematicConstraints& lim) {
  Scenario scn;
  scn.label = "preset1";
  KinematicConstraints inner = lim;
  inner.min_range_m = lim.min_range_m + 1.0;
  inner.max_range_m = lim.min_range_m + 15.0;
  KinematicConstraints outer = lim;
  outer.min_range_m = lim.max_range_m - 14.0;
  outer.max_range_m = lim.max_range_m - 1.0;
  int frames = scn.frame_count();
  scn.trajectories.push_back(generate_random_walk(
      inner, frames, scn.dt_s, mix_seed(seed, 0x11), 0, 0));
  scn.trajectories.push_back(generate_random_walk(
      outer, frames, scn.dt_s, mix_seed(seed, 0x12), 0, 1));
  return scn;
}

std::vector<Trajectory> build_event(const KinematicConstraints& lim,
                                    const EventSpec& spec, double dt,
                                    std::uint64_t seed, int preset,
                                    int event_idx) {
  for (int attempt = 0; attempt < 1500; ++attempt) {
    std::vector<Trajectory> members;
    for (const auto& wp : spec.members) {
      auto rng = make_rng(
          seed, (static_cast<std::uint64_t>(preset) << 28) |
                    (static_cast<std::uint64_t>(event_idx) << 20) |
                    (static_cast<std::uint64_t>(attempt) << 8) |
                    static_cast<std::uint64_t>(wp.id));
      members.push_back(build_through_waypoint(lim, wp, dt, rng));
    }
    if (event_ok(members, spec)) return members;
  }
  throw std::runtime_error("preset construction did not converge");
}

Scenario make_crossing_preset(int preset, std::uint64_t seed,
                              const KinematicConstraints& lim,
                              const std::vector<EventSpec>& events,
                              const char* label) {
  Scenario scn;
  scn.label = label;
  for (std::size_t e = 0; e < events.size(); ++e) {
    auto members = build_event(lim, events[e], scn.dt_s, seed, preset,
                               static_cast<int>(e));
    for (auto& tr : members) scn.trajectories.push_back(std::move(tr));
  }
  std::sort(scn.trajectories.begin(), scn.trajectories.end(),
            [](const Trajectory& a, const Trajectory& b) {
              return a.id < b.id;
            });
  return scn;
}

Scenario make_preset2(std::uint64_t seed, const KinematicConstraints& lim) {
  auto rng = make_rng(seed, 0x21);
  std::uniform_real_distribution<double> ur(26.0, 44.0);
  std::uniform_real_distribution<double> ub(-kPi, kPi);
  std::uniform_real_distribution<double> uv(0.6, 1.1);
  std::uniform_real_distribution<double> ut(0.3, 0.7);
  double r0 = ur(rng), b0 = ub(rng), vr = uv(rng);
  double ta = ut(rng), tb = ut(rng);
  EventSpec ev;
  ev.members = {
      {r0, b0, vr, ta, 800, 0, 3000, 0},
      {r0 + 0.15, b0, vr - 0.28, -tb, 800, 0, 3000, 1},
  };
  return make_crossing_preset(2, seed, lim, {ev}, "preset2");
}

Scenario make_preset3(std::uint64_t seed, const KinematicConstraints& lim) {
  auto rng = make_rng(seed, 0x31);
  std::uniform_real_distribution<double> ub(-kPi, kPi);
  double b0 = ub(rng), b1 = ub(rng), b2 = ub(rng);
  EventSpec e0, e1, e2;
  e0.members = {{27.0, b0, 0.9, 0.45, 600, 0, 3000, 0},
                {27.15, b0, 0.62, -0.55, 600, 100, 2600, 1}};
  e1.members = {{39.0, b1, -0.8, 0.5, 1500, 50, 3000, 2},
                {39.15, b1, -0.52, -0.4, 1500, 300, 2800, 3}};
  e2.members = {{47.0, b2, 0.7, 0.6, 2100, 200, 3000, 4},
                {47.15, b2, 0.95, -0.5, 2100, 400, 3000, 5}};
  return make_crossing_preset(3, seed, lim, {e0, e1, e2}, "preset3");
}

Scenario make_preset4(std::uint64_t seed, const KinematicConstraints& lim) {
  auto rng = make_rng(seed, 0x41);
  std::uniform_real_distribution<double> ub(-kPi, kPi);
  double b0 = ub(rng);
  double vr = -0.9;
  EventSpec ev;
  ev.members = {
      {34.0, b0, vr, 0.35, 1200, 0, 3000, 0},
      {34.08, b0, vr + 0.06, -0.5, 1200, 100, 2950, 1},
      {33.92, b0, vr - 0.06, 0.65, 1200, 250, 2900, 2},
      {34.16, b0, vr + 0.12, -0.35, 1200, 400, 3000, 3},
      {33.84, b0, vr - 0.12, 0.5, 1200, 550, 2850, 4},
      {34.24, b0, vr + 0.15, -0.65, 1200, 700, 2800, 5},
  };
  ev.require_resolution = false;
  return make_crossing_preset(4, seed, lim, {ev}, "preset4");
}

}  // namespace

std::vector<const Trajectory*> Scenario::alive_at(int frame) const {
  std::vector<const Trajectory*> out;
  for (const auto& tr : trajectories) {
    if (tr.alive_at(frame)) out.push_back(&tr);
  }
  return out;
}

int Scenario::cardinality_at(int frame) const {
  return static_cast<int>(alive_at(frame).size());
}

Trajectory generate_random_walk(const KinematicConstraints& limits, int frames,
                                double dt_s, std::uint64_t seed,
                                int birth_frame, int id) {
  validate_limits(limits);
  if (frames < 1 || !(dt_s > 0.0)) {
    throw std::invalid_argument("walk needs frames >= 1 and dt > 0");
  }
  auto rng = make_rng(seed, 0x17);
  double span = limits.max_range_m - limits.min_range_m;
  double pad = std::min(2.0, 0.25 * span);
  std::uniform_real_distribution<double> ur(limits.min_range_m + pad,
                                            limits.max_range_m - pad);
  std::uniform_real_distribution<double> ua(-kPi, kPi);
  std::uniform_real_distribution<double> us(0.1 * limits.max_speed_mps,
                                            0.6 * limits.max_speed_mps);
  Walk2D w;
  double r0 = ur(rng), bearing = ua(rng);
  w.pos = r0 * Eigen::Vector2d(std::cos(bearing), std::sin(bearing));
  w.speed = us(rng);
  w.heading = ua(rng);
  auto pts = walk_from(limits, frames, dt_s, w, rng);
  return positions_to_trajectory(pts, dt_s, birth_frame, id);
}

bool objects_cross(const Trajectory& a, const Trajectory& b, int frame) {
  if (!a.alive_at(frame) || !b.alive_at(frame)) return false;
  const auto& sa = a.state_at(frame);
  const auto& sb = b.state_at(frame);
  return std::abs(sa.range_m - sb.range_m) <= 0.5 &&
         std::abs(sa.speed_mps - sb.speed_mps) <= 0.3;
}

Scenario make_preset(int preset, std::uint64_t seed,
                     const KinematicConstraints& limits) {
  validate_limits(limits);
  switch (preset) {
    case 1: return make_preset1(seed, limits);
    case 2: return make_preset2(seed, limits);
    case 3: return make_preset3(seed, limits);
    case 4: return make_preset4(seed, limits);
    default: throw std::invalid_argument("preset must be 1..4");
  }
}

std::vector<int> crossing_frames(const Scenario& scenario) {
  std::vector<int> out;
  int frames = scenario.frame_count();
  for (int k = 0; k < frames; ++k) {
    bool any = false;
    for (std::size_t i = 0; i + 1 < scenario.trajectories.size() && !any; ++i) {
      for (std::size_t j = i + 1; j < scenario.trajectories.size() && !any; ++j) {
        any = objects_cross(scenario.trajectories[i], scenario.trajectories[j],
                            k);
      }
    }
    if (any) out.push_back(k);
  }
  return out;
}

}  // namespace isac
