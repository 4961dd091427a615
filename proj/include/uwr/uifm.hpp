#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Core>

#include "uwr/types.hpp"

namespace uwr {

// kTied forces the backscatter coefficient equal to the attenuation
// coefficient, recovering the single-coefficient haze model.
enum class ParamMode { kFull, kTied };

// Per-channel image formation parameters:
//   I = J * exp(-attenuation * z) + veiling * (1 - exp(-backscatter * z))
// Values are unconstrained reals during optimization.
struct UifmParams {
    Eigen::Vector3d attenuation{0.1, 0.1, 0.1}; // beta, 1/m
    Eigen::Vector3d veiling{0.1, 0.1, 0.1};     // B, asymptotic water color
    Eigen::Vector3d backscatter{0.1, 0.1, 0.1}; // gamma, 1/m
    ParamMode mode = ParamMode::kFull;

    // In tied mode the backscatter coefficient mirrors attenuation; call
    // after every attenuation update.
    void tie() {
        if (mode == ParamMode::kTied) backscatter = attenuation;
    }
};

double uifm_forward(double j, double z, const UifmParams& params, int channel);

// (I - B*(1 - e^(-gamma z))) * e^(beta z). May leave [0,1]; clamping is the
// caller's business. Inverts uifm_forward exactly for moderate beta*z; past
// ~20 the e^(beta z) amplification overflows double precision usefully.
double uifm_invert_single(double intensity, double z, const UifmParams& params, int channel);

struct ResidualGrads {
    double residual;      // I - J e^(-beta z) - B (1 - e^(-gamma z))
    double d_j;           // gradients of 1/2 r^2
    double d_attenuation;
    double d_veiling;
    double d_backscatter;
};

// In tied mode the attenuation slot carries d_beta + d_gamma and the
// backscatter slot is zero.
ResidualGrads uifm_residual_and_grads(double intensity, double z, double j,
                                      const UifmParams& params, int channel);

// Per-pixel restored intensities under optimization plus the shared model
// parameters. J is stored densely over the target grid; entries without
// depth are NaN and never touched.
struct RestorationState {
    std::int64_t target_id = -1;
    int width = 0, height = 0;
    std::vector<double> j;          // 3*W*H interleaved RGB
    std::vector<std::uint8_t> mask; // W*H, 1 where the target has depth
    UifmParams params;
    bool free_j = true;
    bool free_attenuation = true;
    bool free_veiling = true;
    bool free_backscatter = true;

    bool any_free() const {
        return free_j || free_attenuation || free_veiling || free_backscatter;
    }
};

} // namespace uwr
