#pragma once

#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "crystal/evolve.hpp"

namespace crystal {

/// Shortest fixed-width-free rendering with 17 significant digits; deterministic across runs.
std::string fmt(double value);

void write_monitors_csv(std::ostream& out, std::span<const Monitor> monitors);
void write_snapshots_csv(std::ostream& out, std::span<const Snapshot> snapshots);
void write_profile_csv(std::ostream& out, const AdmissibleProfile& profile);
void write_events_jsonl(std::ostream& out, std::span<const Event> events);

/// Profile polylines, one per snapshot, with corner markers.
void write_profile_svg(std::ostream& out, std::span<const Snapshot> snapshots);
void write_polygon_svg(std::ostream& out, std::span<const Vec2> points, bool closed, const std::string& title);

}  // namespace crystal
