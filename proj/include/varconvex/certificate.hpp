#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "varconvex/test_function.hpp"
#include "varconvex/vec_util.hpp"

namespace varconvex {

using json = nlohmann::ordered_json;

enum class Verdict { Holds, FailsWithWitness, Inconclusive };

inline const char* to_string(Verdict v) {
    switch (v) {
        case Verdict::Holds: return "Holds";
        case Verdict::FailsWithWitness: return "FailsWithWitness";
        case Verdict::Inconclusive: return "Inconclusive";
    }
    return "?";
}

/// The neighborhood data of a localized check: a primal ball, a dual ball and
/// the value threshold phi(x) < f_center + eps_value.
struct AttentiveWindow {
    Vec center_x;
    Vec center_xstar;
    double radius_x = 0.25;
    double radius_dual = 0.25;
    double eps_value = 0.05;
    double f_center = 0.0;
};

inline AttentiveWindow make_window(const TestFunction& f, Vec x, Vec xstar,
                                   double radius_x = 0.25,
                                   double radius_dual = 0.25,
                                   double eps_value = 0.05) {
    AttentiveWindow w;
    ExtReal fx = f.eval(x);
    if (!fx.finite())
        throw NonFiniteValue("window center has infinite function value");
    if (radius_x <= 0 || radius_dual <= 0 || eps_value <= 0)
        throw std::invalid_argument("window radii and eps_value must be positive");
    w.center_x = std::move(x);
    w.center_xstar = std::move(xstar);
    w.radius_x = radius_x;
    w.radius_dual = radius_dual;
    w.eps_value = eps_value;
    w.f_center = fx.value();
    return w;
}

/// Outcome of one certifier run. A FailsWithWitness verdict always carries
/// structured witness data that re-checks to the same violation.
struct Certificate {
    Verdict verdict = Verdict::Inconclusive;
    std::string criterion;
    json witness;  // null unless FailsWithWitness
    std::optional<AttentiveWindow> window;
    json params = json::object();
    std::vector<std::string> notes;

    bool holds() const { return verdict == Verdict::Holds; }
    bool fails() const { return verdict == Verdict::FailsWithWitness; }

    static Certificate pass(std::string criterion) {
        Certificate c;
        c.verdict = Verdict::Holds;
        c.criterion = std::move(criterion);
        return c;
    }
    static Certificate fail(std::string criterion, json witness) {
        Certificate c;
        c.verdict = Verdict::FailsWithWitness;
        c.criterion = std::move(criterion);
        c.witness = std::move(witness);
        return c;
    }
    static Certificate inconclusive(std::string criterion, std::string why) {
        Certificate c;
        c.verdict = Verdict::Inconclusive;
        c.criterion = std::move(criterion);
        c.notes.push_back(std::move(why));
        return c;
    }
};

}  // namespace varconvex
