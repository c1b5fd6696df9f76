#pragma once
// Pluggable statement encoders standing in for a pre-trained language model.
// Two baselines ship: a signed hashed bag-of-words and an averaging loader
// for GloVe-style word-embedding files.

#include <memory>
#include <string>
#include <unordered_map>

#include "schemaqa/numerics/tensor.hpp"

namespace schemaqa::text {

using StatementVector = numerics::Tensor;  // rank-1, fixed dimension per run

class TextEncoder {
public:
    virtual ~TextEncoder() = default;
    virtual std::size_t dimension() const = 0;
    // Deterministic; empty or fully unknown text encodes to the zero vector.
    virtual StatementVector encode(const std::string& text) const = 0;
};

// Each lemma lands on a hashed coordinate with a hashed sign; the result is
// L2-normalized. Same lemma multiset in any order -> bitwise-identical vector.
class HashedBagOfWords final : public TextEncoder {
public:
    explicit HashedBagOfWords(std::size_t dimension);
    std::size_t dimension() const override { return dimension_; }
    StatementVector encode(const std::string& text) const override;

private:
    std::size_t dimension_;
};

// Word-embedding text file: one token per line followed by its values,
// space-separated. encode() averages the vectors of known tokens.
class FileEmbeddings final : public TextEncoder {
public:
    explicit FileEmbeddings(const std::string& path);
    std::size_t dimension() const override { return dimension_; }
    StatementVector encode(const std::string& text) const override;
    std::size_t vocabulary_size() const { return table_.size(); }

private:
    std::size_t dimension_ = 0;
    std::unordered_map<std::string, std::vector<double>> table_;
};

std::unique_ptr<TextEncoder> make_hashed_encoder(std::size_t dimension);
std::unique_ptr<TextEncoder> make_file_encoder(const std::string& path);

}  // namespace schemaqa::text
