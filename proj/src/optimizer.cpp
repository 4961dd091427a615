#include "uwr/optimizer.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

#include "uwr/errors.hpp"
#include "uwr/parallel.hpp"

namespace uwr {

void AdamConfig::validate() const {
    if (!(learning_rate > 0.0)) throw DataError("AdamConfig: learning_rate must be positive");
    if (steps < 1) throw DataError("AdamConfig: steps must be >= 1");
    if (!(beta1 >= 0.0 && beta1 < 1.0) || !(beta2 >= 0.0 && beta2 < 1.0))
        throw DataError("AdamConfig: moment decays must lie in [0, 1)");
    if (log_every < 1) throw DataError("AdamConfig: log_every must be >= 1");
}

double objective(const ObservationSet& obs, const RestorationState& state, int channel) {
    double total = 0.0;
    const std::size_t n = obs.size();
    for (std::size_t i = 0; i < n; ++i) {
        double j = state.j[static_cast<std::size_t>(obs.pixel_index[i]) * 3 + channel];
        auto g = uifm_residual_and_grads(obs.intensity[i * 3 + channel], obs.distance[i], j,
                                         state.params, channel);
        total += g.residual * g.residual;
    }
    return total;
}

RestorationState init_state(const PosedImage& target) {
    target.validate();
    RestorationState state;
    state.target_id = target.id;
    state.width = target.image.width;
    state.height = target.image.height;
    const std::size_t n_px = static_cast<std::size_t>(state.width) * state.height;
    state.j.assign(n_px * 3, std::numeric_limits<double>::quiet_NaN());
    state.mask.assign(n_px, 0);
    for (int v = 0; v < state.height; ++v)
        for (int u = 0; u < state.width; ++u)
            if (target.depth.has_depth(u, v)) {
                std::size_t p = static_cast<std::size_t>(v) * state.width + u;
                state.mask[p] = 1;
                for (int c = 0; c < 3; ++c) state.j[p * 3 + c] = target.intensity(u, v, c);
            }
    state.params = UifmParams{}; // 0.1 everywhere, full mode
    return state;
}

void freeze(RestorationState& state, const std::vector<ParamGroup>& groups) {
    for (ParamGroup g : groups) {
        switch (g) {
        case ParamGroup::kJ: state.free_j = false; break;
        case ParamGroup::kAttenuation: state.free_attenuation = false; break;
        case ParamGroup::kVeiling: state.free_veiling = false; break;
        case ParamGroup::kBackscatter: state.free_backscatter = false; break;
        }
    }
    if (!state.any_free()) throw DataError("no free parameters");
}

void freeze(RestorationState& state, std::initializer_list<ParamGroup> groups) {
    freeze(state, std::vector<ParamGroup>(groups));
}

std::vector<ParamGroup> parse_groups(const std::string& csv) {
    std::vector<ParamGroup> groups;
    std::stringstream ss(csv);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        if (tok.empty()) continue;
        if (tok == "J" || tok == "j")
            groups.push_back(ParamGroup::kJ);
        else if (tok == "beta")
            groups.push_back(ParamGroup::kAttenuation);
        else if (tok == "B")
            groups.push_back(ParamGroup::kVeiling);
        else if (tok == "gamma")
            groups.push_back(ParamGroup::kBackscatter);
        else
            throw DataError("unknown parameter group '" + tok + "' (expected J, beta, B, gamma)");
    }
    return groups;
}

namespace {

struct ScalarPartials {
    double objective = 0.0;
    double d_attenuation = 0.0;
    double d_veiling = 0.0;
    double d_backscatter = 0.0;
};

// Chunks aligned to pixel-segment boundaries: every observation of a pixel
// lands in exactly one chunk, so per-pixel J gradients never race.
struct Chunk {
    std::size_t seg_begin, seg_end;
};

std::vector<Chunk> make_chunks(const std::vector<ObservationSet::Segment>& segs,
                               std::size_t target_obs_per_chunk) {
    std::vector<Chunk> chunks;
    std::size_t i = 0;
    while (i < segs.size()) {
        std::size_t j = i;
        std::size_t obs = 0;
        while (j < segs.size() && obs < target_obs_per_chunk) {
            obs += segs[j].end - segs[j].begin;
            ++j;
        }
        chunks.push_back({i, j});
        i = j;
    }
    return chunks;
}

double adam_update(double& m, double& v, double grad, double corr1, double corr2,
                   const AdamConfig& cfg) {
    m = cfg.beta1 * m + (1.0 - cfg.beta1) * grad;
    v = cfg.beta2 * v + (1.0 - cfg.beta2) * grad * grad;
    double m_hat = m / corr1;
    double v_hat = v / corr2;
    return cfg.learning_rate * m_hat / (std::sqrt(v_hat) + cfg.epsilon);
}

} // namespace

FitResult fit(const ObservationSet& obs, RestorationState state, const AdamConfig& cfg) {
    cfg.validate();
    if (obs.size() == 0) throw DataError("fit: no observations");
    if (!state.any_free()) throw DataError("no free parameters");
    state.params.tie();

    const auto segs = obs.segments();
    const auto chunks = make_chunks(segs, 1 << 16);
    const char* channel_names = "RGB";

    std::vector<TracePoint> trace;
    std::vector<ScalarPartials> partials(chunks.size());

    for (int c = 0; c < 3; ++c) {
        AdamState adam;
        adam.m_j.assign(segs.size(), 0.0);
        adam.v_j.assign(segs.size(), 0.0);

        for (int step = 0; step < cfg.steps; ++step) {
            const UifmParams params = state.params; // snapshot: full-batch semantics
            const double corr1 = 1.0 - std::pow(cfg.beta1, adam.step + 1);
            const double corr2 = 1.0 - std::pow(cfg.beta2, adam.step + 1);

            parallel_for_index(chunks.size(), [&](std::size_t ci) {
                ScalarPartials part;
                const double att_c = params.attenuation[c];
                const double back_c = params.backscatter[c];
                const double veil_c = params.veiling[c];
                const bool tied = params.mode == ParamMode::kTied;
                for (std::size_t si = chunks[ci].seg_begin; si < chunks[ci].seg_end; ++si) {
                    const auto& seg = segs[si];
                    const std::size_t jslot = static_cast<std::size_t>(seg.pixel) * 3 + c;
                    const double j_val = state.j[jslot];
                    double d_j = 0.0;
                    for (std::size_t i = seg.begin; i < seg.end; ++i) {
                        const double z = obs.distance[i];
                        const double att = std::exp(-att_c * z);
                        const double back = std::exp(-back_c * z);
                        const double r =
                            obs.intensity[i * 3 + c] - j_val * att - veil_c * (1.0 - back);
                        part.objective += r * r;
                        d_j -= r * att;
                        part.d_attenuation += r * j_val * z * att;
                        part.d_veiling -= r * (1.0 - back);
                        part.d_backscatter -= r * veil_c * z * back;
                    }
                    if (state.free_j) {
                        state.j[jslot] -=
                            adam_update(adam.m_j[si], adam.v_j[si], d_j, corr1, corr2, cfg);
                    }
                }
                if (tied) {
                    part.d_attenuation += part.d_backscatter;
                    part.d_backscatter = 0.0;
                }
                partials[ci] = part;
            });

            // Combine chunk partials in chunk order.
            ScalarPartials total;
            for (const auto& p : partials) {
                total.objective += p.objective;
                total.d_attenuation += p.d_attenuation;
                total.d_veiling += p.d_veiling;
                total.d_backscatter += p.d_backscatter;
            }
            if (!std::isfinite(total.objective))
                throw NumericError(std::string("non-finite objective at step ") +
                                   std::to_string(step) + " channel " + channel_names[c]);
            if (step % cfg.log_every == 0) trace.push_back({c, step, total.objective});

            if (state.free_attenuation)
                state.params.attenuation[c] -= adam_update(
                    adam.m_attenuation, adam.v_attenuation, total.d_attenuation, corr1, corr2, cfg);
            if (state.free_veiling)
                state.params.veiling[c] -= adam_update(adam.m_veiling, adam.v_veiling,
                                                       total.d_veiling, corr1, corr2, cfg);
            if (state.free_backscatter && state.params.mode == ParamMode::kFull)
                state.params.backscatter[c] -= adam_update(
                    adam.m_backscatter, adam.v_backscatter, total.d_backscatter, corr1, corr2, cfg);
            state.params.tie();
            ++adam.step;
        }

        double final_obj = objective(obs, state, c);
        if (!std::isfinite(final_obj))
            throw NumericError(std::string("non-finite objective after final step, channel ") +
                               channel_names[c]);
        trace.push_back({c, cfg.steps, final_obj});
    }

    return {std::move(state), std::move(trace)};
}

namespace {

// Tied-mode chunk combination above folds d_backscatter into d_attenuation
// per chunk; since the fold is linear this equals folding the totals.

void write_double(std::ostream& out, double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    out << buf;
}

} // namespace

void write_fit_report(const std::filesystem::path& path, const RestorationState& state,
                      const std::vector<TracePoint>& trace) {
    std::ofstream out(path);
    if (!out) throw DataError("cannot write fit report: " + path.string());
    out << "# fit report\n";
    out << "# params CHANNEL beta B gamma   (objective = sum of squared residuals)\n";
    const char* names = "RGB";
    for (int c = 0; c < 3; ++c) {
        out << "params " << names[c] << ' ';
        write_double(out, state.params.attenuation[c]);
        out << ' ';
        write_double(out, state.params.veiling[c]);
        out << ' ';
        write_double(out, state.params.backscatter[c]);
        out << '\n';
    }
    out << "mode " << (state.params.mode == ParamMode::kTied ? "tied" : "full") << '\n';
    for (const auto& t : trace) {
        out << "trace " << names[t.channel] << ' ' << t.step << ' ';
        write_double(out, t.objective);
        out << '\n';
    }
    if (!out) throw DataError("I/O error writing fit report: " + path.string());
}

FitReport read_fit_report(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open fit report: " + path.string());
    FitReport report;
    std::string line;
    auto channel_of = [&](const std::string& s) {
        if (s == "R") return 0;
        if (s == "G") return 1;
        if (s == "B") return 2;
        throw DataError("bad channel in fit report: " + s);
    };
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        std::istringstream ss(line);
        std::string kind;
        ss >> kind;
        if (kind == "params") {
            std::string ch;
            double beta, veil, gamma;
            if (!(ss >> ch >> beta >> veil >> gamma))
                throw DataError("malformed params line in " + path.string());
            int c = channel_of(ch);
            report.params.attenuation[c] = beta;
            report.params.veiling[c] = veil;
            report.params.backscatter[c] = gamma;
        } else if (kind == "mode") {
            std::string m;
            ss >> m;
            report.params.mode = (m == "tied") ? ParamMode::kTied : ParamMode::kFull;
        } else if (kind == "trace") {
            std::string ch;
            TracePoint t{};
            if (!(ss >> ch >> t.step >> t.objective))
                throw DataError("malformed trace line in " + path.string());
            t.channel = channel_of(ch);
            report.trace.push_back(t);
        }
    }
    for (const auto& t : report.trace) report.final_objective[t.channel] = t.objective;
    return report;
}

} // namespace uwr
