#include "crystal/io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include <json.hpp>

namespace crystal {

std::string fmt(double value) {
  char buffer[32];
  std::snprintf(buffer, sizeof buffer, "%.17g", value);
  return buffer;
}

void write_monitors_csv(std::ostream& out, std::span<const Monitor> monitors) {
  out << "t,energy,ux2_mass,max_ut,max_u,n_faces\n";
  for (const auto& m : monitors) {
    out << fmt(m.t) << ',' << fmt(m.energy) << ',' << fmt(m.ux2_mass) << ',' << fmt(m.max_ut) << ','
        << fmt(m.max_u) << ',' << m.n_faces << '\n';
  }
}

void write_snapshots_csv(std::ostream& out, std::span<const Snapshot> snapshots) {
  out << "t,face_index,x_left,x_right,slope\n";
  for (const auto& s : snapshots) {
    const auto x = s.profile.corners();
    for (std::size_t i = 0; i < s.profile.faces(); ++i) {
      out << fmt(s.t) << ',' << i << ',' << fmt(x[i]) << ',' << fmt(x[i + 1]) << ',' << fmt(s.profile.slope(i))
          << '\n';
    }
  }
}

void write_profile_csv(std::ostream& out, const AdmissibleProfile& p) {
  out << "face_index,x_left,x_right,slope,length\n";
  const auto x = p.corners();
  for (std::size_t i = 0; i < p.faces(); ++i) {
    out << i << ',' << fmt(x[i]) << ',' << fmt(x[i + 1]) << ',' << fmt(p.slope(i)) << ',' << fmt(p.length(i))
        << '\n';
  }
}

void write_events_jsonl(std::ostream& out, std::span<const Event> events) {
  for (const auto& e : events) {
    nlohmann::ordered_json j;
    j["t"] = e.t;
    j["kind"] = e.kind;
    j["faces"] = e.faces;
    j["abs_delta"] = e.deltas;
    j["pre"] = e.pre;
    j["post"] = e.post;
    if (!e.note.empty()) j["note"] = e.note;
    out << j.dump() << '\n';
  }
}

namespace {

struct Frame {
  double x0, x1, y0, y1;
  double width = 640.0, height = 400.0, pad = 30.0;
  double px(double x) const { return pad + (x - x0) / (x1 - x0) * (width - 2.0 * pad); }
  double py(double y) const { return height - pad - (y - y0) / (y1 - y0) * (height - 2.0 * pad); }
};

void open_svg(std::ostream& out, const Frame& f, const std::string& title) {
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << f.width << "\" height=\"" << f.height
      << "\" viewBox=\"0 0 " << f.width << ' ' << f.height << "\">\n";
  out << "<title>" << title << "</title>\n";
  out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
}

}  // namespace

void write_profile_svg(std::ostream& out, std::span<const Snapshot> snapshots) {
  double lo = 0.0, hi = 0.0;
  for (const auto& s : snapshots) {
    for (double u : s.profile.corner_values()) {
      lo = std::min(lo, u);
      hi = std::max(hi, u);
    }
  }
  if (hi - lo < 1e-12) hi = lo + 1.0;
  const double margin = 0.05 * (hi - lo);
  Frame f{0.0, 1.0, lo - margin, hi + margin};
  open_svg(out, f, "profile snapshots");
  out << "<line x1=\"" << f.px(0) << "\" y1=\"" << f.py(0) << "\" x2=\"" << f.px(1) << "\" y2=\"" << f.py(0)
      << "\" stroke=\"#bbb\"/>\n";
  for (std::size_t k = 0; k < snapshots.size(); ++k) {
    const auto& p = snapshots[k].profile;
    const auto u = p.corner_values();
    const auto x = p.corners();
    const double shade = snapshots.size() > 1 ? static_cast<double>(k) / static_cast<double>(snapshots.size() - 1) : 0.0;
    const int blue = static_cast<int>(80 + 175 * (1.0 - shade));
    out << "<g><title>t = " << fmt(snapshots[k].t) << "</title><polyline fill=\"none\" stroke=\"rgb(30,60," << blue
        << ")\" stroke-width=\"1\" points=\"";
    for (std::size_t i = 0; i < x.size(); ++i) out << f.px(x[i]) << ',' << f.py(u[i]) << ' ';
    out << "\"/>";
    for (std::size_t i = 0; i < x.size(); ++i) {
      out << "<circle cx=\"" << f.px(x[i]) << "\" cy=\"" << f.py(u[i]) << "\" r=\"1.5\" fill=\"rgb(30,60," << blue
          << ")\"/>";
    }
    out << "</g>\n";
  }
  out << "</svg>\n";
}

void write_polygon_svg(std::ostream& out, std::span<const Vec2> points, bool closed, const std::string& title) {
  double r = 1e-12;
  for (const auto& v : points) r = std::max({r, std::abs(v.x), std::abs(v.y)});
  r *= 1.1;
  Frame f{-r, r, -r, r, 480.0, 480.0, 20.0};
  open_svg(out, f, title);
  out << "<line x1=\"" << f.px(-r) << "\" y1=\"" << f.py(0) << "\" x2=\"" << f.px(r) << "\" y2=\"" << f.py(0)
      << "\" stroke=\"#ccc\"/>\n";
  out << "<line x1=\"" << f.px(0) << "\" y1=\"" << f.py(-r) << "\" x2=\"" << f.px(0) << "\" y2=\"" << f.py(r)
      << "\" stroke=\"#ccc\"/>\n";
  out << '<' << (closed ? "polygon" : "polyline") << " fill=\"none\" stroke=\"black\" points=\"";
  for (const auto& v : points) out << f.px(v.x) << ',' << f.py(v.y) << ' ';
  out << "\"/>\n</svg>\n";
}

}  // namespace crystal
