#pragma once

#include <filesystem>
#include <initializer_list>
#include <string>
#include <vector>

#include "uwr/pairing.hpp"
#include "uwr/uifm.hpp"

namespace uwr {

struct AdamConfig {
    double learning_rate = 0.05;
    int steps = 200;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;
    int log_every = 10;

    void validate() const;
};

// First/second moment accumulators laid out like the free parameters:
// one pair per observed pixel's J, plus one pair per scalar coefficient.
struct AdamState {
    std::vector<double> m_j, v_j; // per observed pixel
    double m_attenuation = 0.0, v_attenuation = 0.0;
    double m_veiling = 0.0, v_veiling = 0.0;
    double m_backscatter = 0.0, v_backscatter = 0.0;
    int step = 0;
};

struct TracePoint {
    int channel; // 0=R 1=G 2=B
    int step;    // objective measured before update `step`; steps == cfg.steps is final
    double objective;
};

// Sum of squared residuals over all observations of one channel (Eq. sum,
// not mean).
double objective(const ObservationSet& obs, const RestorationState& state, int channel);

// Naive initial solution: J = I on pixels with depth, all coefficients 0.1,
// everything free, full (untied) mode.
RestorationState init_state(const PosedImage& target);

enum class ParamGroup { kJ, kAttenuation, kVeiling, kBackscatter };

// Marks groups as frozen; fit() leaves them untouched. Throws DataError when
// the state would end up with no free parameters at all.
void freeze(RestorationState& state, std::initializer_list<ParamGroup> groups);
void freeze(RestorationState& state, const std::vector<ParamGroup>& groups);

// Parses "J,beta,B,gamma"-style lists (the CLI surface names).
std::vector<ParamGroup> parse_groups(const std::string& csv);

struct FitResult {
    RestorationState state;
    std::vector<TracePoint> trace;
};

// Full-batch Adam on the per-channel least-squares objective. Channels are
// independent problems run back to back. Gradient accumulation is chunked at
// pixel-segment granularity and chunk partials are combined in index order,
// so results are bit-identical regardless of worker count.
FitResult fit(const ObservationSet& obs, RestorationState state, const AdamConfig& cfg);

// Fit report: fitted coefficients, final objective, and the trace.
void write_fit_report(const std::filesystem::path& path, const RestorationState& state,
                      const std::vector<TracePoint>& trace);

struct FitReport {
    UifmParams params;
    Eigen::Vector3d final_objective{0, 0, 0};
    std::vector<TracePoint> trace;
};

FitReport read_fit_report(const std::filesystem::path& path);

} // namespace uwr
