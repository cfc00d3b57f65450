#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace affrep {

/// Where a failed identity was observed. Indices are 1-based, matching the
/// serialized forms.
struct Witness {
    std::vector<int> indices;
    std::string monomial;
    std::string value;

    friend bool operator==(const Witness&, const Witness&) = default;
};

struct Check {
    std::string name;
    bool pass = false;
    std::optional<Witness> witness;

    friend bool operator==(const Check&, const Check&) = default;
};

struct ReportMetadata {
    std::optional<std::size_t> dim;
    std::optional<std::string> operator_class;
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> truncation_order;

    friend bool operator==(const ReportMetadata&, const ReportMetadata&) = default;
};

/// Ordered record of which identities hold. Every failed check carries a
/// witness; `facts` holds named derived values (exact strings).
class VerificationReport {
public:
    void pass(std::string name);
    void fail(std::string name, Witness witness);
    void record(std::string name, bool ok, Witness witness_if_failed);
    void fact(std::string key, std::string value);
    /// Appends another report's checks and facts, prefixing their names.
    void merge(const VerificationReport& other, const std::string& prefix = {});

    bool all_pass() const;
    const std::vector<Check>& checks() const { return checks_; }
    const std::vector<std::pair<std::string, std::string>>& facts() const { return facts_; }
    const Check* find(const std::string& name) const;
    std::optional<std::string> fact_value(const std::string& key) const;

    ReportMetadata& metadata() { return metadata_; }
    const ReportMetadata& metadata() const { return metadata_; }

    /// One "name: true|false" line per check, then "key: value" per fact.
    std::string to_text() const;

    friend bool operator==(const VerificationReport&, const VerificationReport&) = default;

private:
    std::vector<Check> checks_;
    std::vector<std::pair<std::string, std::string>> facts_;
    ReportMetadata metadata_;
};

}  // namespace affrep
