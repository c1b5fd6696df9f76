#pragma once
// Embedding-table vocabulary over surface strings. Row 0 is the shared
// unknown slot, so out-of-vocabulary concepts and relations at eval time
// resolve to a trained fallback row.

#include <string>
#include <unordered_map>
#include <vector>

namespace schemaqa::encoders {

class Vocab {
public:
    Vocab() { add("<unk>"); }

    std::uint32_t add(const std::string& term) {
        auto it = index_.find(term);
        if (it != index_.end()) return it->second;
        std::uint32_t id = static_cast<std::uint32_t>(terms_.size());
        terms_.push_back(term);
        index_.emplace(term, id);
        return id;
    }

    std::uint32_t index_of(const std::string& term) const {
        auto it = index_.find(term);
        return it == index_.end() ? 0u : it->second;
    }

    bool contains(const std::string& term) const { return index_.count(term) > 0; }
    std::size_t size() const { return terms_.size(); }
    const std::string& term(std::uint32_t id) const { return terms_.at(id); }
    const std::vector<std::string>& terms() const { return terms_; }

private:
    std::vector<std::string> terms_;
    std::unordered_map<std::string, std::uint32_t> index_;
};

}  // namespace schemaqa::encoders
