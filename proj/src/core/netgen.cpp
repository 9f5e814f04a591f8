// Copyright 2026 The sinprecode Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "netgen.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <numbers>
#include <ostream>

#include "rng.hpp"

namespace sinp::netgen {

namespace {

constexpr double kPi = std::numbers::pi;

Point axial_to_xy(int q, int r, double spacing) {
  return {spacing * (q + 0.5 * r), spacing * (0.5 * std::sqrt(3.0) * r)};
}

double norm(Point p) { return std::hypot(p.x, p.y); }

double wrap_angle(double a) {
  a = std::fmod(a + kPi, 2.0 * kPi);
  if (a < 0) a += 2.0 * kPi;
  return a - kPi;
}

bool inside_hexagon(double x, double y, double apothem) {
  const double s = 0.5 * std::sqrt(3.0);
  return std::abs(x) <= apothem && std::abs(0.5 * x + s * y) <= apothem &&
         std::abs(-0.5 * x + s * y) <= apothem;
}

}  // namespace

// ------------------------------------------------------------ ChannelSet --

Eigen::Index ChannelSet::total_antennas() const {
  Eigen::Index n = 0;
  for (int m : base_antennas) n += m;
  return n;
}

bool ChannelSet::scalar() const {
  return std::all_of(base_antennas.begin(), base_antennas.end(), [](int m) { return m == 1; }) &&
         std::all_of(user_antennas.begin(), user_antennas.end(), [](int n) { return n == 1; });
}

CMatrix ChannelSet::scalar_matrix() const {
  require(scalar(), "scalar_matrix: channel set has multi-antenna terminals");
  CMatrix h(num_users(), num_bases());
  for (int i = 0; i < num_users(); ++i) h.row(i) = aggregate[i].row(0);
  return h;
}

ChannelSet ChannelSet::from_links(std::vector<std::vector<CMatrix>> links) {
  require(!links.empty() && !links.front().empty(), "from_links: empty link table");
  ChannelSet cs;
  const std::size_t k = links.size();
  const std::size_t b = links.front().size();
  for (std::size_t j = 0; j < b; ++j) cs.base_antennas.push_back(static_cast<int>(links[0][j].cols()));
  for (std::size_t i = 0; i < k; ++i) {
    require(links[i].size() == b, "from_links: ragged link table");
    cs.user_antennas.push_back(static_cast<int>(links[i][0].rows()));
  }
  Eigen::Index off = 0;
  for (int m : cs.base_antennas) {
    cs.base_offset.push_back(off);
    off += m;
  }
  cs.aggregate.reserve(k);
  for (std::size_t i = 0; i < k; ++i) {
    CMatrix agg(cs.user_antennas[i], off);
    for (std::size_t j = 0; j < b; ++j) {
      const CMatrix& hij = links[i][j];
      require(hij.rows() == cs.user_antennas[i] && hij.cols() == cs.base_antennas[j],
              "from_links: inconsistent link shape");
      agg.middleCols(cs.base_offset[j], hij.cols()) = hij;
    }
    cs.aggregate.push_back(std::move(agg));
  }
  cs.link = std::move(links);
  return cs;
}

ChannelSet ChannelSet::from_scalar(const CMatrix& h) {
  std::vector<std::vector<CMatrix>> links(h.rows(), std::vector<CMatrix>(h.cols()));
  for (Eigen::Index i = 0; i < h.rows(); ++i)
    for (Eigen::Index j = 0; j < h.cols(); ++j) links[i][j] = CMatrix::Constant(1, 1, h(i, j));
  return from_links(std::move(links));
}

// ------------------------------------------------------------------ line --

NetworkGeometry line_layout(int bases, double dx, double dy) {
  require(bases >= 1, "line_layout: need at least one base");
  require(dx > 0.0 && dy > 0.0, "line_layout: spacings must be positive");
  NetworkGeometry g;
  g.kind = NetworkKind::Line;
  g.dx = dx;
  g.dy = dy;
  for (int j = 0; j < bases; ++j) {
    g.base_pos.push_back({dx * j, 0.0});
    g.user_pos.push_back({dx * j, dy});
    g.base_antennas.push_back(1);
    g.user_antennas.push_back(1);
    g.serving_base.push_back(j);
  }
  return g;
}

int circular_offset(int user, int base, int bases) {
  require(bases >= 1, "circular_offset: bases must be positive");
  require(user >= 0 && user < bases && base >= 0 && base < bases,
          "circular_offset: index out of range");
  const int m = std::abs(user - base) % bases;
  return std::min(m, bases - m);
}

double wrap_distance(int user, int base, const NetworkGeometry& geometry) {
  require(geometry.kind == NetworkKind::Line, "wrap_distance: line network required");
  const int m = circular_offset(user, base, geometry.num_bases());
  return std::hypot(geometry.dy, geometry.dx * m);
}

LargeScaleGains line_gains(const NetworkGeometry& geometry, double eta) {
  require(geometry.kind == NetworkKind::Line, "line_gains: line network required");
  require(eta > 0.0, "line_gains: path-loss exponent must be positive");
  const int b = geometry.num_bases();
  LargeScaleGains out{RMatrix(b, b)};
  for (int i = 0; i < b; ++i)
    for (int j = 0; j < b; ++j) out.gain(i, j) = std::pow(wrap_distance(i, j, geometry), -eta);
  return out;
}

// ------------------------------------------------------------------- hex --

std::vector<Point> hex_site_positions(double spacing_km) {
  struct Cell {
    int ring;
    double angle;
    Point p;
  };
  std::vector<Cell> cells;
  for (int q = -2; q <= 2; ++q)
    for (int r = -2; r <= 2; ++r) {
      const int ring = std::max({std::abs(q), std::abs(r), std::abs(q + r)});
      if (ring > 2) continue;
      Point p = axial_to_xy(q, r, spacing_km);
      double a = std::atan2(p.y, p.x);
      if (a < -1e-12) a += 2.0 * kPi;
      cells.push_back({ring, ring == 0 ? 0.0 : a, p});
    }
  std::sort(cells.begin(), cells.end(), [](const Cell& a, const Cell& b) {
    if (a.ring != b.ring) return a.ring < b.ring;
    return a.angle < b.angle - 1e-9;
  });
  std::vector<Point> out;
  for (const auto& c : cells) out.push_back(c.p);
  return out;
}

std::vector<Point> hex_wrap_shifts(double spacing_km) {
  std::vector<Point> out;
  int q = 3, r = 2;
  for (int k = 0; k < 6; ++k) {
    out.push_back(axial_to_xy(q, r, spacing_km));
    const int nq = -r, nr = q + r;  // 60 degree rotation in axial coordinates
    q = nq;
    r = nr;
  }
  return out;
}

Point hex_wrap_delta(Point from, Point to, double spacing_km) {
  static thread_local double cached_spacing = -1.0;
  static thread_local std::vector<Point> shifts;
  if (cached_spacing != spacing_km) {
    shifts = hex_wrap_shifts(spacing_km);
    cached_spacing = spacing_km;
  }
  Point best{to.x - from.x, to.y - from.y};
  double best_n = norm(best);
  for (const Point& s : shifts) {
    Point d{to.x - from.x - s.x, to.y - from.y - s.y};
    const double n = norm(d);
    if (n < best_n) {
      best = d;
      best_n = n;
    }
  }
  return best;
}

double antenna_gain_db(double off_boresight_rad, const HexParams& params) {
  const double deg = wrap_angle(off_boresight_rad) * 180.0 / kPi;
  const double ratio = deg / params.beamwidth_3db_deg;
  return -std::min(12.0 * ratio * ratio, params.max_attenuation_db);
}

double hex_link_gain(Point user, int base, const NetworkGeometry& geometry,
                     const HexParams& params) {
  const Point site = geometry.site_pos[geometry.base_site[base]];
  const Point d = hex_wrap_delta(site, user, params.site_spacing_km);
  const double dist = std::max(norm(d), params.min_distance_km);
  const double angle = std::atan2(d.y, d.x) - geometry.boresight[base];
  const double pathloss = std::pow(dist / params.cell_edge_km(), -params.pathloss_exponent);
  return pathloss * std::pow(10.0, antenna_gain_db(angle, params) / 10.0);
}

ShadowSampler::ShadowSampler(std::uint64_t seed, int sites, const HexParams& params)
    : rng_(seed), sites_(sites), params_(params) {}

double ShadowSampler::correlation(Point a, Point b) const {
  const double d = norm(hex_wrap_delta(a, b, params_.site_spacing_km));
  return std::exp(-d / params_.shadow_decorrelation_km);
}

RVector ShadowSampler::draw(Point p) {
  std::normal_distribution<double> normal(0.0, 1.0);
  const int fields = sites_ + 1;
  RVector z(fields);
  for (int f = 0; f < fields; ++f) z(f) = normal(rng_);
  const auto n = static_cast<Eigen::Index>(points_.size());
  if (n == 0) return z;

  RMatrix cov(n, n);
  RVector k(n);
  for (Eigen::Index a = 0; a < n; ++a) {
    k(a) = correlation(points_[a], p);
    cov(a, a) = 1.0 + 1e-10;
    for (Eigen::Index b = 0; b < a; ++b) cov(a, b) = cov(b, a) = correlation(points_[a], points_[b]);
  }
  Eigen::LLT<RMatrix> llt(cov);
  if (llt.info() != Eigen::Success) fail(ErrorCode::Numeric, "shadow covariance not positive definite");
  const RVector alpha = llt.solve(k);
  const double var = std::max(0.0, 1.0 - k.dot(alpha));
  RVector out(fields);
  for (int f = 0; f < fields; ++f) {
    double mean = 0.0;
    for (Eigen::Index a = 0; a < n; ++a) mean += alpha(a) * values_[a](f);
    out(f) = mean + std::sqrt(var) * z(f);
  }
  return out;
}

void ShadowSampler::commit(Point p, const RVector& values) {
  points_.push_back(p);
  values_.push_back(values);
}

void ShadowSampler::remove(std::size_t index) {
  require(index < points_.size(), "ShadowSampler::remove: index out of range");
  points_.erase(points_.begin() + static_cast<std::ptrdiff_t>(index));
  values_.erase(values_.begin() + static_cast<std::ptrdiff_t>(index));
}

RVector ShadowSampler::to_db(const RVector& values) const {
  const double common = std::sqrt(params_.site_correlation);
  const double own = std::sqrt(1.0 - params_.site_correlation);
  RVector out(sites_);
  for (int s = 0; s < sites_; ++s)
    out(s) = params_.shadow_std_db * (common * values(0) + own * values(s + 1));
  return out;
}

NetworkGeometry hex_layout(std::uint64_t seed, const HexParams& params) {
  require(params.site_spacing_km > 0.0, "hex_layout: site spacing must be positive");
  require(params.site_correlation >= 0.0 && params.site_correlation <= 1.0,
          "hex_layout: site correlation must lie in [0, 1]");
  NetworkGeometry g;
  g.kind = NetworkKind::Hex;
  g.site_pos = hex_site_positions(params.site_spacing_km);
  for (int s = 0; s < kHexSites; ++s)
    for (int c = 0; c < kSectorsPerSite; ++c) {
      g.base_pos.push_back(g.site_pos[s]);
      g.base_site.push_back(s);
      g.boresight.push_back((params.boresight0_deg + 120.0 * c) * kPi / 180.0);
      g.base_antennas.push_back(1);
    }

  std::mt19937_64 rng(seed);
  ShadowSampler sampler(mix64(seed ^ seed_domain::kShadowField), kHexSites, params);
  std::uniform_int_distribution<int> pick_cell(0, kHexSites - 1);
  const double apothem = 0.5 * params.site_spacing_km;
  const double circumradius = params.site_spacing_km / std::sqrt(3.0);
  std::uniform_real_distribution<double> ux(-apothem, apothem);
  std::uniform_real_distribution<double> uy(-circumradius, circumradius);

  auto random_point = [&]() {
    const Point c = g.site_pos[pick_cell(rng)];
    for (;;) {
      const double x = ux(rng), y = uy(rng);
      if (inside_hexagon(x, y, apothem)) return Point{c.x + x, c.y + y};
    }
  };

  struct Candidate {
    Point p;
    RVector field;
    RVector shadow_db;
    int sector = -1;
    double gain = 0.0;
  };
  auto evaluate = [&](Candidate& c) {
    c.shadow_db = sampler.to_db(c.field);
    c.sector = -1;
    c.gain = -1.0;
    for (int b = 0; b < kHexSectors; ++b) {
      const double gain =
          hex_link_gain(c.p, b, g, params) * std::pow(10.0, c.shadow_db(g.base_site[b]) / 10.0);
      if (gain > c.gain) {
        c.gain = gain;
        c.sector = b;
      }
    }
  };

  std::vector<Candidate> initial(kHexSectors);
  for (auto& c : initial) {
    c.p = random_point();
    c.field = sampler.draw(c.p);
    sampler.commit(c.p, c.field);
    evaluate(c);
  }

  // Strongest claimant keeps each sector; ties go to the lower index.
  std::vector<int> owner(kHexSectors, -1);
  for (int u = 0; u < kHexSectors; ++u) {
    int& o = owner[initial[u].sector];
    if (o < 0 || initial[u].gain > initial[o].gain) o = u;
  }
  std::vector<int> losers;
  for (int u = 0; u < kHexSectors; ++u) {
    if (owner[initial[u].sector] == u) continue;
    losers.push_back(u);
  }
  for (auto it = losers.rbegin(); it != losers.rend(); ++it) sampler.remove(static_cast<std::size_t>(*it));

  std::vector<Candidate> by_sector(kHexSectors);
  std::vector<bool> filled(kHexSectors, false);
  for (int s = 0; s < kHexSectors; ++s)
    if (owner[s] >= 0) {
      by_sector[s] = initial[owner[s]];
      filled[s] = true;
    }

  for (std::size_t l = 0; l < losers.size(); ++l) {
    for (int attempt = 0; attempt < params.placement_attempts; ++attempt) {
      Candidate c;
      c.p = random_point();
      c.field = sampler.draw(c.p);
      evaluate(c);
      if (!filled[c.sector]) {
        sampler.commit(c.p, c.field);
        filled[c.sector] = true;
        by_sector[c.sector] = std::move(c);
        break;
      }
    }
  }

  std::vector<int> sectors;
  for (int s = 0; s < kHexSectors; ++s)
    if (filled[s]) sectors.push_back(s);
  g.shadow_db.resize(static_cast<Eigen::Index>(sectors.size()), kHexSites);
  for (std::size_t i = 0; i < sectors.size(); ++i) {
    const Candidate& c = by_sector[sectors[i]];
    g.user_pos.push_back(c.p);
    g.user_antennas.push_back(1);
    g.serving_base.push_back(sectors[i]);
    g.shadow_db.row(static_cast<Eigen::Index>(i)) = c.shadow_db.transpose();
  }
  return g;
}

LargeScaleGains hex_gains(const NetworkGeometry& geometry, const HexParams& params) {
  require(geometry.kind == NetworkKind::Hex, "hex_gains: hex network required");
  const int k = geometry.num_users(), b = geometry.num_bases();
  LargeScaleGains out{RMatrix(k, b)};
  for (int i = 0; i < k; ++i)
    for (int j = 0; j < b; ++j) {
      double shadow = 0.0;
      if (geometry.shadow_db.size() > 0) shadow = geometry.shadow_db(i, geometry.base_site[j]);
      out.gain(i, j) =
          hex_link_gain(geometry.user_pos[i], j, geometry, params) * std::pow(10.0, shadow / 10.0);
    }
  return out;
}

// ---------------------------------------------------------------- fading --

ChannelSet draw_channels(const LargeScaleGains& gains, const NetworkGeometry& geometry,
                         std::uint64_t seed) {
  const int k = gains.num_users(), b = gains.num_bases();
  require(k == geometry.num_users() && b == geometry.num_bases(),
          "draw_channels: gains and geometry disagree on network size");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<std::vector<CMatrix>> links(k, std::vector<CMatrix>(b));
  for (int i = 0; i < k; ++i)
    for (int j = 0; j < b; ++j) {
      const double g = gains.gain(i, j);
      require(g > 0.0 && std::isfinite(g), "draw_channels: gains must be positive and finite");
      const double scale = std::sqrt(0.5 * g);
      CMatrix h(geometry.user_antennas[i], geometry.base_antennas[j]);
      for (Eigen::Index c = 0; c < h.cols(); ++c)
        for (Eigen::Index r = 0; r < h.rows(); ++r) {
          const double re = normal(rng);
          const double im = normal(rng);
          h(r, c) = cplx(scale * re, scale * im);
        }
      links[i][j] = std::move(h);
    }
  return ChannelSet::from_links(std::move(links));
}

void write_gains_csv(std::ostream& out, const LargeScaleGains& gains) {
  out << "# sinp-gains v1: row = user, column = base, value = gain in dB\n";
  out << "user";
  for (int j = 0; j < gains.num_bases(); ++j) out << ",base" << (j + 1);
  out << '\n';
  out << std::setprecision(6);
  for (int i = 0; i < gains.num_users(); ++i) {
    out << (i + 1);
    for (int j = 0; j < gains.num_bases(); ++j) out << ',' << 10.0 * std::log10(gains.gain(i, j));
    out << '\n';
  }
}

}  // namespace sinp::netgen
