#include "risnoma/channel.hpp"

#include <cmath>
#include <iomanip>
#include <istream>
#include <limits>
#include <ostream>
#include <random>
#include <sstream>

#include "risnoma/errors.hpp"

namespace risnoma {

CVec steering_vector(double theta, int n) {
  CVec a(n);
  const double phase = kPi * std::sin(theta);
  for (int k = 0; k < n; ++k) a[k] = std::polar(1.0, phase * k);
  return a;
}

double path_loss(double distance, double exponent, double c0) {
  return c0 * std::pow(std::max(distance, 1.0), -exponent);
}

double array_angle(const Point2& from, const Point2& to) {
  return std::atan2(to.x - from.x, to.y - from.y);
}

namespace {

// Box-Muller on top of mt19937_64 keeps realizations identical across
// standard library implementations.
class GaussianSource {
 public:
  explicit GaussianSource(std::uint64_t seed) : engine_(seed) {}

  Complex circular() {
    const double u1 = uniform_open();
    const double u2 = uniform_open();
    const double r = std::sqrt(-std::log(u1));  // |z|^2 ~ Exp(1)
    return std::polar(r, 2.0 * kPi * u2);
  }

 private:
  double uniform_open() {
    return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53;
  }
  std::mt19937_64 engine_;
};

struct RicianWeights {
  double los;
  double nlos;
};

RicianWeights rician_weights(double kappa) {
  if (std::isinf(kappa)) return {1.0, 0.0};
  return {std::sqrt(kappa / (1.0 + kappa)), std::sqrt(1.0 / (1.0 + kappa))};
}

}  // namespace

ChannelSet generate(const Scenario& scenario, std::uint64_t seed) {
  const SystemConfig& sys = scenario.sys;
  ChannelSet ch;
  ChannelGeometry& geo = ch.geometry;
  geo.theta_bs_departure = array_angle(sys.bs_position, sys.ris_position);
  geo.theta_ris_arrival = array_angle(sys.ris_position, sys.bs_position);
  geo.loss_bs_ris = path_loss(scenario.dist_bs_ris, sys.pathloss_exponent_bs_ris, sys.pathloss_ref);

  const RicianWeights w = rician_weights(sys.rician_factor);
  GaussianSource rng(seed);

  const CVec a_ris = steering_vector(geo.theta_ris_arrival, sys.N_s);
  const CVec a_bs = steering_vector(geo.theta_bs_departure, sys.M);
  const double amp_br = std::sqrt(geo.loss_bs_ris);
  ch.H.resize(sys.N_s, sys.M);
  for (int n = 0; n < sys.N_s; ++n) {
    for (int m = 0; m < sys.M; ++m) {
      const Complex los = a_ris[n] * std::conj(a_bs[m]);
      const Complex nlos = rng.circular();
      ch.H(n, m) = amp_br * (w.los * los + w.nlos * nlos);
    }
  }

  ch.user_rows.reserve(scenario.K);
  for (int k = 0; k < scenario.K; ++k) {
    const double theta = array_angle(sys.ris_position, sys.user_positions[k]);
    const double loss = path_loss(scenario.dist_ris_user[k], sys.pathloss_exponent_ris_user, sys.pathloss_ref);
    geo.theta_user.push_back(theta);
    geo.loss_ris_user.push_back(loss);
    const CVec a = steering_vector(theta, sys.N_s);
    const double amp = std::sqrt(loss);
    CVec row(sys.N_s);
    for (int n = 0; n < sys.N_s; ++n) {
      row[n] = amp * (w.los * std::conj(a[n]) + w.nlos * rng.circular());
    }
    ch.user_rows.push_back(std::move(row));
  }
  return ch;
}

CVec cascaded(const CVec& user_row, const CVec& v, const CMat& H) {
  if (user_row.size() != H.rows() || v.size() != H.rows()) {
    throw DimensionError("cascaded: user channel, phase vector and H rows must agree");
  }
  return H.transpose() * v.conjugate().cwiseProduct(user_row);
}

CMat reflection_matrix(const CVec& v) { return v.conjugate().asDiagonal(); }

double effective_gain(const CVec& cascaded_row, const CVec& w) {
  return std::norm(cascaded_row.cwiseProduct(w).sum());
}

namespace {

void write_row(std::ostream& out, const Complex* data, Eigen::Index count, Eigen::Index stride) {
  for (Eigen::Index i = 0; i < count; ++i) {
    const Complex z = data[i * stride];
    if (i) out << ' ';
    out << z.real() << ',' << z.imag();
  }
  out << '\n';
}

Complex read_pair(std::istream& in) {
  std::string token;
  if (!(in >> token)) throw Error("load_channels: truncated file");
  const auto comma = token.find(',');
  if (comma == std::string::npos) throw Error("load_channels: expected re,im but got '" + token + "'");
  return {std::stod(token.substr(0, comma)), std::stod(token.substr(comma + 1))};
}

}  // namespace

void dump_channels(const ChannelSet& ch, std::ostream& out) {
  const auto old_precision = out.precision(std::numeric_limits<double>::max_digits10);
  out << "risnoma-channels 1\n";
  out << ch.N_s() << ' ' << ch.M() << ' ' << ch.user_rows.size() << '\n';
  for (int n = 0; n < ch.N_s(); ++n) {
    for (int m = 0; m < ch.M(); ++m) {
      if (m) out << ' ';
      out << ch.H(n, m).real() << ',' << ch.H(n, m).imag();
    }
    out << '\n';
  }
  for (const auto& row : ch.user_rows) write_row(out, row.data(), row.size(), 1);
  out.precision(old_precision);
}

ChannelSet load_channels(std::istream& in) {
  std::string magic;
  int version = 0;
  in >> magic >> version;
  if (magic != "risnoma-channels" || version != 1) throw Error("load_channels: unrecognized header");
  int N_s = 0, M = 0, K = 0;
  if (!(in >> N_s >> M >> K) || N_s < 1 || M < 1 || K < 0) throw Error("load_channels: bad dimensions");
  ChannelSet ch;
  ch.H.resize(N_s, M);
  for (int n = 0; n < N_s; ++n)
    for (int m = 0; m < M; ++m) ch.H(n, m) = read_pair(in);
  for (int k = 0; k < K; ++k) {
    CVec row(N_s);
    for (int n = 0; n < N_s; ++n) row[n] = read_pair(in);
    ch.user_rows.push_back(std::move(row));
  }
  return ch;
}

}  // namespace risnoma
