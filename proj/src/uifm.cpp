#include "uwr/uifm.hpp"

#include <cmath>
#include <stdexcept>

namespace uwr {

namespace {

void check_finite(double j, double z) {
    if (!std::isfinite(j) || !std::isfinite(z) || z < 0.0)
        throw std::domain_error("uifm: inputs must be finite with z >= 0");
}

} // namespace

double uifm_forward(double j, double z, const UifmParams& params, int channel) {
    check_finite(j, z);
    double direct = j * std::exp(-params.attenuation[channel] * z);
    double scatter = params.veiling[channel] * (1.0 - std::exp(-params.backscatter[channel] * z));
    return direct + scatter;
}

double uifm_invert_single(double intensity, double z, const UifmParams& params, int channel) {
    check_finite(intensity, z);
    double scatter = params.veiling[channel] * (1.0 - std::exp(-params.backscatter[channel] * z));
    return (intensity - scatter) * std::exp(params.attenuation[channel] * z);
}

ResidualGrads uifm_residual_and_grads(double intensity, double z, double j,
                                      const UifmParams& params, int channel) {
    double att = std::exp(-params.attenuation[channel] * z);
    double back = std::exp(-params.backscatter[channel] * z);
    double b = params.veiling[channel];

    ResidualGrads g;
    g.residual = intensity - j * att - b * (1.0 - back);
    g.d_j = -g.residual * att;
    g.d_attenuation = g.residual * j * z * att;
    g.d_veiling = -g.residual * (1.0 - back);
    g.d_backscatter = -g.residual * b * z * back;
    if (params.mode == ParamMode::kTied) {
        g.d_attenuation += g.d_backscatter;
        g.d_backscatter = 0.0;
    }
    return g;
}

} // namespace uwr
