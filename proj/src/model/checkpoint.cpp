#include "schemaqa/model/checkpoint.hpp"

#include <cstring>
#include <fstream>
#include <map>

namespace schemaqa::model {

namespace {

constexpr char kMagic[4] = {'S', 'Q', 'C', 'P'};
constexpr std::uint32_t kVersion = 1;

void write_u32(std::ostream& out, std::uint32_t v) {
    out.write(reinterpret_cast<const char*>(&v), sizeof(v));
}
void write_u64(std::ostream& out, std::uint64_t v) {
    out.write(reinterpret_cast<const char*>(&v), sizeof(v));
}
void write_str(std::ostream& out, const std::string& s) {
    write_u64(out, s.size());
    out.write(s.data(), static_cast<std::streamsize>(s.size()));
}

std::uint32_t read_u32(std::istream& in) {
    std::uint32_t v = 0;
    in.read(reinterpret_cast<char*>(&v), sizeof(v));
    if (!in) throw Error("checkpoint: unexpected end of file");
    return v;
}
std::uint64_t read_u64(std::istream& in) {
    std::uint64_t v = 0;
    in.read(reinterpret_cast<char*>(&v), sizeof(v));
    if (!in) throw Error("checkpoint: unexpected end of file");
    return v;
}
std::string read_str(std::istream& in) {
    std::uint64_t len = read_u64(in);
    if (len > (1ull << 30)) throw Error("checkpoint: implausible string length");
    std::string s(len, '\0');
    in.read(s.data(), static_cast<std::streamsize>(len));
    if (!in) throw Error("checkpoint: unexpected end of file");
    return s;
}

void write_vocab(std::ostream& out, const encoders::Vocab& vocab) {
    write_u64(out, vocab.size());
    for (const auto& term : vocab.terms()) write_str(out, term);
}

encoders::Vocab read_vocab(std::istream& in) {
    encoders::Vocab vocab;
    std::uint64_t count = read_u64(in);
    for (std::uint64_t i = 0; i < count; ++i) vocab.add(read_str(in));
    if (vocab.size() != count) throw Error("checkpoint: corrupt vocabulary");
    return vocab;
}

}  // namespace

void save_checkpoint(const std::string& path, ModelParams& params) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write checkpoint: " + path);
    out.write(kMagic, 4);
    write_u32(out, kVersion);
    write_str(out, params.config.to_json());
    write_vocab(out, params.concept_vocab);
    write_vocab(out, params.relation_vocab);

    std::uint64_t count = 0;
    params.visit_tensors([&](const std::string&, numerics::Tensor&) { ++count; });
    write_u64(out, count);
    params.visit_tensors([&](const std::string& name, numerics::Tensor& t) {
        write_str(out, name);
        write_u32(out, static_cast<std::uint32_t>(t.rank()));
        for (std::size_t d : t.shape) write_u64(out, d);
        out.write(reinterpret_cast<const char*>(t.data.data()),
                  static_cast<std::streamsize>(t.data.size() * sizeof(double)));
    });
    if (!out) throw Error("checkpoint write failed: " + path);
}

ModelParams load_checkpoint(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open checkpoint: " + path);
    char magic[4];
    in.read(magic, 4);
    if (!in || std::memcmp(magic, kMagic, 4) != 0) {
        throw Error("not a checkpoint file: " + path);
    }
    std::uint32_t version = read_u32(in);
    if (version != kVersion) {
        throw Error("unsupported checkpoint version " + std::to_string(version));
    }
    TrainConfig config = TrainConfig::from_json(read_str(in));
    encoders::Vocab concepts = read_vocab(in);
    encoders::Vocab relations = read_vocab(in);
    ModelParams params = ModelParams::init(config, std::move(concepts), std::move(relations));

    std::map<std::string, numerics::Tensor> stored;
    std::uint64_t count = read_u64(in);
    for (std::uint64_t i = 0; i < count; ++i) {
        std::string name = read_str(in);
        std::uint32_t rank = read_u32(in);
        if (rank > 4) throw Error("checkpoint: implausible tensor rank");
        std::vector<std::size_t> shape;
        for (std::uint32_t d = 0; d < rank; ++d) {
            shape.push_back(static_cast<std::size_t>(read_u64(in)));
        }
        numerics::Tensor t = numerics::Tensor::zeros(shape);
        in.read(reinterpret_cast<char*>(t.data.data()),
                static_cast<std::streamsize>(t.data.size() * sizeof(double)));
        if (!in) throw Error("checkpoint: unexpected end of file");
        stored.emplace(std::move(name), std::move(t));
    }

    params.visit_tensors([&](const std::string& name, numerics::Tensor& t) {
        auto it = stored.find(name);
        if (it == stored.end()) throw Error("checkpoint: missing tensor '" + name + "'");
        if (!t.same_shape(it->second)) {
            throw Error("checkpoint: tensor '" + name + "' has unexpected shape");
        }
        t = it->second;
    });
    return params;
}

}  // namespace schemaqa::model
