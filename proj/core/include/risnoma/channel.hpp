#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "risnoma/scenario.hpp"
#include "risnoma/types.hpp"

namespace risnoma {

/// Conventions used throughout the library:
///  * a user channel is stored as the physical row response h^H (length N_s),
///  * a cascaded channel is stored as the row h^H Phi H (length M), so the
///    effective gain of a beamformer w is |row.transpose() * w|^2,
///  * the RIS phase vector v carries conjugated reflection coefficients,
///    Phi = diag(conj(v)), which gives h^H Phi H = v^H diag(h^H) H.

struct ChannelGeometry {
  double theta_bs_departure = 0.0;  ///< RIS direction seen from the BS array
  double theta_ris_arrival = 0.0;   ///< BS direction seen from the RIS
  std::vector<double> theta_user;   ///< user directions seen from the RIS
  double loss_bs_ris = 0.0;
  std::vector<double> loss_ris_user;
};

struct ChannelSet {
  CMat H;                       ///< N_s x M, BS -> RIS
  std::vector<CVec> user_rows;  ///< per user, row response RIS -> user
  ChannelGeometry geometry;

  int N_s() const { return static_cast<int>(H.rows()); }
  int M() const { return static_cast<int>(H.cols()); }
};

/// Half-wavelength ULA response: entry k is exp(j pi k sin(theta)).
CVec steering_vector(double theta, int n);

/// c0 * d^-a with d clamped to the 1 m reference distance.
double path_loss(double distance, double exponent, double c0);

/// Direction of `to` seen from an x-axis array at `from`, measured from
/// broadside (+y) towards +x.
double array_angle(const Point2& from, const Point2& to);

/// Rician block-fading realization, deterministic in `seed`.
ChannelSet generate(const Scenario& scenario, std::uint64_t seed);

/// Cascaded row h^H Phi H computed through the diagonal rewrite.
CVec cascaded(const CVec& user_row, const CVec& v, const CMat& H);

/// Reflection matrix Phi for the phase vector v.
CMat reflection_matrix(const CVec& v);

/// Effective channel gain |row^T w|^2.
double effective_gain(const CVec& cascaded_row, const CVec& w);

/// Text dump: header line, dimensions, then row-major "re,im" pairs.
void dump_channels(const ChannelSet& ch, std::ostream& out);
ChannelSet load_channels(std::istream& in);

}  // namespace risnoma
