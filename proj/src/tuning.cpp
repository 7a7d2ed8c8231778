#include "cpdp/tuning.hpp"

namespace cpdp {

TuningResult grid_search(LearnerKind kind, std::span<const Instance> training,
                         std::span<const ValidationSet> validation) {
    if (validation.empty()) throw Error("grid_search: no validation sets");
    if (training.empty()) throw Error("grid_search: empty training data");

    std::vector<Matrix> val_x;
    std::vector<std::vector<std::uint8_t>> val_y;
    for (const auto& s : validation) {
        val_x.push_back(to_matrix(s.instances));
        val_y.push_back(to_labels(s.instances));
    }
    Matrix x = to_matrix(training);
    std::vector<std::uint8_t> y = to_labels(training);

    TuningResult res;
    res.validation_count = int(validation.size());
    std::vector<LearnerSpec> specs = grid(kind);
    res.scores.reserve(specs.size());

    double best = -1.0;
    for (const auto& spec : specs) {
        double fit = 0.0;
        try {
            TrainedModel model = train(spec, x, y);
            for (std::size_t v = 0; v < val_x.size(); ++v)
                fit += evaluate(model, val_x[v], val_y[v]).fitness;
            fit /= double(val_x.size());
        } catch (const Error&) {
            fit = 0.0;
        }
        res.scores.push_back(fit);
        if (fit > best) {
            best = fit;
            res.best_spec = spec;
        }
    }
    return res;
}

}  // namespace cpdp
