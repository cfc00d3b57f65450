#include "affrep/report.hpp"

#include <algorithm>
#include <sstream>

namespace affrep {

void VerificationReport::pass(std::string name) {
    checks_.push_back({std::move(name), true, std::nullopt});
}

void VerificationReport::fail(std::string name, Witness witness) {
    checks_.push_back({std::move(name), false, std::move(witness)});
}

void VerificationReport::record(std::string name, bool ok, Witness witness_if_failed) {
    if (ok) {
        pass(std::move(name));
    } else {
        fail(std::move(name), std::move(witness_if_failed));
    }
}

void VerificationReport::fact(std::string key, std::string value) {
    facts_.emplace_back(std::move(key), std::move(value));
}

void VerificationReport::merge(const VerificationReport& other, const std::string& prefix) {
    for (const auto& c : other.checks_) {
        checks_.push_back({prefix + c.name, c.pass, c.witness});
    }
    for (const auto& [k, v] : other.facts_) facts_.emplace_back(prefix + k, v);
}

bool VerificationReport::all_pass() const {
    return std::all_of(checks_.begin(), checks_.end(), [](const Check& c) { return c.pass; });
}

const Check* VerificationReport::find(const std::string& name) const {
    auto it = std::find_if(checks_.begin(), checks_.end(),
                           [&](const Check& c) { return c.name == name; });
    return it == checks_.end() ? nullptr : &*it;
}

std::optional<std::string> VerificationReport::fact_value(const std::string& key) const {
    auto it = std::find_if(facts_.begin(), facts_.end(),
                           [&](const auto& kv) { return kv.first == key; });
    if (it == facts_.end()) return std::nullopt;
    return it->second;
}

std::string VerificationReport::to_text() const {
    std::ostringstream os;
    for (const auto& c : checks_) {
        os << c.name << ": " << (c.pass ? "true" : "false");
        if (c.witness) {
            os << "  [at (";
            for (std::size_t i = 0; i < c.witness->indices.size(); ++i) {
                os << (i ? "," : "") << c.witness->indices[i];
            }
            os << ")";
            if (!c.witness->monomial.empty()) os << " monomial " << c.witness->monomial;
            if (!c.witness->value.empty()) os << " value " << c.witness->value;
            os << "]";
        }
        os << '\n';
    }
    for (const auto& [k, v] : facts_) os << k << ": " << v << '\n';
    return os.str();
}

}  // namespace affrep
