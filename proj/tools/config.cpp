#include "cli.hpp"

#include <algorithm>
#include <cmath>

namespace hilbvp::cli {
namespace {

using nlohmann::json;

class Document {
public:
    Document(const std::string& text, std::string source) : text_(text), source_(std::move(source)) {
        try {
            root_ = json::parse(text);
        } catch (const json::parse_error& e) {
            throw ConfigError(source_ + ":" + std::to_string(line_of_byte(e.byte)) +
                              ": malformed JSON: " + e.what());
        }
        if (!root_.is_object()) fail_at(1, "top-level value must be an object");
    }

    const json& root() const { return root_; }

    [[noreturn]] void fail(const std::string& key, const std::string& message) const {
        fail_at(line_of_key(key), "'" + key + "' " + message);
    }

    [[noreturn]] void fail_at(std::size_t line, const std::string& message) const {
        throw ConfigError(source_ + ":" + std::to_string(line) + ": " + message);
    }

    double number(const json& obj, const std::string& key, std::optional<double> fallback) const {
        if (!obj.contains(key) || obj.at(key).is_null()) {
            if (!fallback) fail(key, "is required");
            return *fallback;
        }
        const json& v = obj.at(key);
        if (!v.is_number()) fail(key, "must be a number");
        const double d = v.get<double>();
        if (!std::isfinite(d)) fail(key, "must be finite");
        return d;
    }

    int integer(const json& obj, const std::string& key, std::optional<int> fallback) const {
        if (!obj.contains(key) || obj.at(key).is_null()) {
            if (!fallback) fail(key, "is required");
            return *fallback;
        }
        const json& v = obj.at(key);
        if (!v.is_number_integer()) fail(key, "must be an integer");
        return v.get<int>();
    }

    std::vector<double> numbers(const json& v, const std::string& key) const {
        if (!v.is_array()) fail(key, "must be an array of numbers");
        std::vector<double> out;
        for (const json& item : v) {
            if (!item.is_number()) fail(key, "must be an array of numbers");
            out.push_back(item.get<double>());
        }
        return out;
    }

    std::vector<int> integers(const json& v, const std::string& key) const {
        if (!v.is_array()) fail(key, "must be an array of integers");
        std::vector<int> out;
        for (const json& item : v) {
            if (!item.is_number_integer()) fail(key, "must be an array of integers");
            out.push_back(item.get<int>());
        }
        return out;
    }

    Matrix matrix(const json& v, const std::string& key, Eigen::Index rows, Eigen::Index cols) const {
        if (v.is_number()) return v.get<double>() * Matrix::Identity(rows, cols);
        if (!v.is_array() || static_cast<Eigen::Index>(v.size()) != rows) {
            fail(key, "must be a number or a " + std::to_string(rows) + "x" + std::to_string(cols) +
                          " array");
        }
        Matrix out(rows, cols);
        for (Eigen::Index i = 0; i < rows; ++i) {
            const std::vector<double> row = numbers(v[static_cast<std::size_t>(i)], key);
            if (static_cast<Eigen::Index>(row.size()) != cols) {
                fail(key, "rows must have " + std::to_string(cols) + " entries");
            }
            for (Eigen::Index j = 0; j < cols; ++j) out(i, j) = row[static_cast<std::size_t>(j)];
        }
        return out;
    }

private:
    std::size_t line_of_byte(std::size_t byte) const {
        const std::size_t end = std::min(byte, text_.size());
        return 1 + static_cast<std::size_t>(
                       std::count(text_.begin(), text_.begin() + static_cast<long>(end), '\n'));
    }

    std::size_t line_of_key(const std::string& key) const {
        const std::size_t pos = text_.find("\"" + key + "\"");
        return pos == std::string::npos ? 1 : line_of_byte(pos);
    }

    const std::string& text_;
    std::string source_;
    json root_;
};

int grid_intervals(const Document& doc, const json& root) {
    const int points = doc.integer(root, "grid_points", 257);
    if (points < 3 || points % 2 == 0) doc.fail("grid_points", "must be an odd integer >= 3");
    return points - 1;
}

template <class F>
auto guarded(const Document& doc, const std::string& key, F&& f) {
    try {
        return f();
    } catch (const ConfigError&) {
        throw;
    } catch (const std::invalid_argument& e) {
        doc.fail(key, std::string("is invalid: ") + e.what());
    }
}

}  // namespace

VdpRun parse_vdp_config(const std::string& text, const std::string& source) {
    const Document doc(text, source);
    const json& root = doc.root();
    static const std::vector<std::string> known = {"epsilon", "modes",    "active", "phases",
                                                   "grid_points", "max_iter", "tol", "sign"};
    for (auto it = root.begin(); it != root.end(); ++it) {
        if (std::find(known.begin(), known.end(), it.key()) == known.end()) {
            doc.fail(it.key(), "is not a recognised key");
        }
    }

    const double eps = doc.number(root, "epsilon", std::nullopt);
    const std::vector<int> active =
        root.contains("active") ? doc.integers(root.at("active"), "active") : std::vector<int>{1};
    const int max_active = active.empty() ? 1 : *std::max_element(active.begin(), active.end());
    const int modes = doc.integer(root, "modes", std::max(1, max_active));
    if (modes < 1) doc.fail("modes", "must be positive");
    const int intervals = grid_intervals(doc, root);

    VdpRun run{VdpConfig{eps, guarded(doc, "grid_points", [&] { return ModeGrid(modes, intervals); }),
                         active, {}},
               IterationOptions{}};
    if (root.contains("phases")) run.config.phases = doc.numbers(root.at("phases"), "phases");
    run.options.tol = doc.number(root, "tol", 1e-10);
    if (run.options.tol <= 0.0) doc.fail("tol", "must be positive");
    run.options.max_iter = doc.integer(root, "max_iter", 200);
    if (run.options.max_iter < 1) doc.fail("max_iter", "must be at least 1");
    if (root.contains("sign")) {
        const json& s = root.at("sign");
        if (s == "consistent") {
            run.options.sign = CorrectionSign::kConsistent;
        } else if (s == "as-printed") {
            run.options.sign = CorrectionSign::kAsPrinted;
        } else {
            doc.fail("sign", "must be \"consistent\" or \"as-printed\"");
        }
    }
    if (eps < 0.0 || eps >= 1.0) doc.fail("epsilon", "must satisfy 0 <= epsilon < 1");
    guarded(doc, "active", [&] {
        validate(run.config);
        return 0;
    });
    return run;
}

LinearRun parse_linear_config(const std::string& text, const std::string& source) {
    const Document doc(text, source);
    const json& root = doc.root();
    static const std::vector<std::string> known = {"modes",    "period",   "frequencies",
                                                   "grid_points", "forcing", "boundary",
                                                   "rank_tol", "consistency_tol"};
    for (auto it = root.begin(); it != root.end(); ++it) {
        if (std::find(known.begin(), known.end(), it.key()) == known.end()) {
            doc.fail(it.key(), "is not a recognised key");
        }
    }

    const int modes = doc.integer(root, "modes", std::nullopt);
    if (modes < 1) doc.fail("modes", "must be positive");
    const double period = doc.number(root, "period", kTwoPi);
    if (period <= 0.0) doc.fail("period", "must be positive");
    const int intervals = grid_intervals(doc, root);
    const Eigen::Index n = 2 * modes;

    ModeGrid grid = guarded(doc, "frequencies", [&] {
        if (!root.contains("frequencies")) return ModeGrid(modes, intervals, period);
        std::vector<double> w = doc.numbers(root.at("frequencies"), "frequencies");
        if (static_cast<int>(w.size()) != modes) doc.fail("frequencies", "must list one per mode");
        return ModeGrid::with_frequencies(std::move(w), intervals, period);
    });

    LinearRun run{LinearBvpProblem{grid, {}, {}}, std::nullopt, kDefaultConsistencyTol};

    if (root.contains("forcing") && !root.at("forcing").is_null()) {
        const json& f = root.at("forcing");
        if (f.is_array()) {
            std::vector<ModalTerm> terms;
            for (const json& t : f) {
                if (!t.is_object()) doc.fail("forcing", "entries must be objects");
                ModalTerm term;
                term.mode = doc.integer(t, "mode", std::nullopt);
                const std::string kind = t.value("kind", std::string("cos"));
                if (kind != "cos" && kind != "sin") doc.fail("kind", "must be \"cos\" or \"sin\"");
                term.shape = kind == "cos" ? ModalShape::kCos : ModalShape::kSin;
                term.frequency = doc.number(t, "frequency", std::nullopt);
                term.amplitude = doc.number(t, "amplitude", 1.0);
                terms.push_back(term);
            }
            run.problem.forcing =
                guarded(doc, "forcing", [&] { return modal_forcing(grid, terms); });
        } else if (f.is_object() && f.contains("samples")) {
            const json& s = f.at("samples");
            if (!s.is_array() || s.size() != grid.size()) {
                doc.fail("samples", "must hold one row per grid point (" +
                                        std::to_string(grid.size()) + ")");
            }
            for (const json& row : s) {
                const std::vector<double> v = doc.numbers(row, "samples");
                if (static_cast<Eigen::Index>(v.size()) != n) {
                    doc.fail("samples", "rows must have " + std::to_string(n) + " entries");
                }
                run.problem.forcing.push_back(Eigen::Map<const Vector>(v.data(), n));
            }
        } else {
            doc.fail("forcing", "must be a list of modal terms or {\"samples\": [...]}");
        }
    }

    if (!root.contains("boundary")) doc.fail("boundary", "is required");
    const json& b = root.at("boundary");
    BoundaryFunctional& l = run.problem.boundary;
    const std::string preset =
        b.is_string() ? b.get<std::string>()
                      : (b.is_object() && b.contains("preset") ? b.at("preset").get<std::string>()
                                                                : std::string());
    if (preset == "periodic") {
        l = periodic_boundary(modes, period);
    } else if (preset == "initial") {
        if (!b.is_object() || !b.contains("alpha")) doc.fail("alpha", "is required");
        const std::vector<double> a = doc.numbers(b.at("alpha"), "alpha");
        if (static_cast<Eigen::Index>(a.size()) != n) {
            doc.fail("alpha", "must have " + std::to_string(n) + " entries");
        }
        l = initial_value_boundary(Eigen::Map<const Vector>(a.data(), n));
    } else if (!preset.empty()) {
        doc.fail("boundary", "preset must be \"periodic\" or \"initial\"");
    } else {
        if (!b.is_object()) doc.fail("boundary", "must be a preset name or an object");
        const std::vector<double> a =
            b.contains("alpha") ? doc.numbers(b.at("alpha"), "alpha") : std::vector<double>(n, 0.0);
        if (static_cast<Eigen::Index>(a.size()) != n) {
            doc.fail("alpha", "must have " + std::to_string(n) + " entries");
        }
        l.target = Eigen::Map<const Vector>(a.data(), n);
        if (b.contains("points")) {
            if (!b.at("points").is_array()) doc.fail("points", "must be an array");
            for (const json& p : b.at("points")) {
                if (!p.is_object()) doc.fail("points", "entries must be objects");
                const double t = doc.number(p, "time", std::nullopt);
                if (!p.contains("matrix")) doc.fail("matrix", "is required");
                l.point_terms.push_back({t, doc.matrix(p.at("matrix"), "matrix", n, n)});
            }
        }
        if (b.contains("kernel")) {
            const json& k = b.at("kernel");
            if (!k.is_array() || k.size() != grid.size()) {
                doc.fail("kernel", "must hold one matrix per grid point");
            }
            for (const json& m : k) l.integral_kernel.push_back(doc.matrix(m, "kernel", n, n));
        }
    }

    if (root.contains("rank_tol") && !root.at("rank_tol").is_null()) {
        run.rank_tol = doc.number(root, "rank_tol", std::nullopt);
        if (*run.rank_tol < 0.0) doc.fail("rank_tol", "must be non-negative");
    }
    run.consistency_tol = doc.number(root, "consistency_tol", kDefaultConsistencyTol);
    if (run.consistency_tol < 0.0) doc.fail("consistency_tol", "must be non-negative");

    guarded(doc, "boundary", [&] { return assemble_Q(run.problem).q.size(); });
    return run;
}

}  // namespace hilbvp::cli
