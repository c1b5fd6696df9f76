#include "schemaqa/text/encoders.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "schemaqa/grounding/grounding.hpp"
#include "schemaqa/util/hash.hpp"

namespace schemaqa::text {

HashedBagOfWords::HashedBagOfWords(std::size_t dimension) : dimension_(dimension) {
    if (dimension == 0) throw Error("HashedBagOfWords: dimension must be positive");
}

StatementVector HashedBagOfWords::encode(const std::string& text) const {
    auto seq = grounding::normalize(text);
    StatementVector v = numerics::Tensor::zeros({dimension_});
    for (const auto& lemma : seq.lemmas) {
        std::uint64_t h = fnv1a64(lemma);
        std::size_t idx = static_cast<std::size_t>((h >> 1) % dimension_);
        v[idx] += (h & 1u) ? 1.0 : -1.0;
    }
    double norm_sq = 0.0;
    for (double x : v.data) norm_sq += x * x;
    if (norm_sq > 0.0) {
        double inv = 1.0 / std::sqrt(norm_sq);
        for (auto& x : v.data) x *= inv;
    }
    return v;
}

FileEmbeddings::FileEmbeddings(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open embedding file: " + path);
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        std::istringstream ss(line);
        std::string token;
        ss >> token;
        std::vector<double> values;
        double x;
        while (ss >> x) values.push_back(x);
        if (token.empty() || values.empty()) {
            throw Error(path + ":" + std::to_string(line_no) + ": malformed embedding line");
        }
        if (dimension_ == 0) {
            dimension_ = values.size();
        } else if (values.size() != dimension_) {
            throw Error(path + ":" + std::to_string(line_no) + ": embedding dimension " +
                        std::to_string(values.size()) + " does not match " +
                        std::to_string(dimension_));
        }
        table_.emplace(std::move(token), std::move(values));
    }
    if (dimension_ == 0) throw Error("embedding file is empty: " + path);
}

StatementVector FileEmbeddings::encode(const std::string& text) const {
    auto seq = grounding::normalize(text);
    StatementVector v = numerics::Tensor::zeros({dimension_});
    std::size_t known = 0;
    for (const auto& token : seq.tokens) {
        auto it = table_.find(token);
        if (it == table_.end()) continue;
        for (std::size_t i = 0; i < dimension_; ++i) v[i] += it->second[i];
        ++known;
    }
    if (known > 0) {
        double inv = 1.0 / static_cast<double>(known);
        for (auto& x : v.data) x *= inv;
    }
    return v;
}

std::unique_ptr<TextEncoder> make_hashed_encoder(std::size_t dimension) {
    return std::make_unique<HashedBagOfWords>(dimension);
}

std::unique_ptr<TextEncoder> make_file_encoder(const std::string& path) {
    return std::make_unique<FileEmbeddings>(path);
}

}  // namespace schemaqa::text
