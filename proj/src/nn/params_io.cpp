#include "weekcast/nn/params_io.hpp"

#include "weekcast/error.hpp"

#include <cstdint>
#include <cstring>

namespace weekcast::nn {

namespace {

nlohmann::json tensor_json(const Tensor& t) {
    return {{"shape", t.shape}, {"values", t.values}};
}

Tensor tensor_from(const nlohmann::json& j) {
    return Tensor(j.at("shape").get<Shape>(), j.at("values").get<std::vector<double>>());
}

constexpr char kMagic[8] = {'W', 'K', 'P', 'A', 'R', 'A', 'M', '1'};

void put_u64(std::string& out, std::uint64_t v) { out.append(reinterpret_cast<const char*>(&v), sizeof v); }

void put_tensor(std::string& out, const Tensor& t) {
    put_u64(out, t.shape.size());
    for (auto d : t.shape) put_u64(out, d);
    out.append(reinterpret_cast<const char*>(t.values.data()), t.values.size() * sizeof(double));
}

class Reader {
public:
    explicit Reader(std::string_view bytes) : bytes_(bytes) {}

    void take(void* dst, std::size_t n) {
        if (bytes_.size() - pos_ < n) throw DataError("params binary: truncated input");
        std::memcpy(dst, bytes_.data() + pos_, n);
        pos_ += n;
    }

    std::uint64_t u64() {
        std::uint64_t v;
        take(&v, sizeof v);
        return v;
    }

    Tensor tensor() {
        const auto rank = u64();
        if (rank > 8) throw DataError("params binary: implausible tensor rank");
        Shape shape(rank);
        std::size_t count = 1;
        for (auto& d : shape) {
            d = u64();
            count *= d;
        }
        if (count > (bytes_.size() - pos_) / sizeof(double)) throw DataError("params binary: truncated tensor");
        std::vector<double> values(count);
        take(values.data(), count * sizeof(double));
        return Tensor(std::move(shape), std::move(values));
    }

    bool done() const { return pos_ == bytes_.size(); }
    std::size_t remaining() const { return bytes_.size() - pos_; }

private:
    std::string_view bytes_;
    std::size_t pos_ = 0;
};

} // namespace

nlohmann::json params_to_json(const Params& params) {
    nlohmann::json layers = nlohmann::json::array();
    for (const auto& l : params.layers) {
        layers.push_back({{"id", l.id}, {"weight", tensor_json(l.weight)}, {"bias", tensor_json(l.bias)}});
    }
    return {{"layers", layers}};
}

Params params_from_json(const nlohmann::json& doc) {
    Params out;
    try {
        for (const auto& l : doc.at("layers")) {
            out.layers.push_back({l.at("id").get<std::string>(), tensor_from(l.at("weight")), tensor_from(l.at("bias"))});
        }
    } catch (const nlohmann::json::exception& e) {
        throw DataError(std::string("params json: ") + e.what());
    }
    return out;
}

std::string params_to_binary(const Params& params) {
    std::string out(kMagic, sizeof kMagic);
    put_u64(out, params.layers.size());
    for (const auto& l : params.layers) {
        put_u64(out, l.id.size());
        out += l.id;
        put_tensor(out, l.weight);
        put_tensor(out, l.bias);
    }
    return out;
}

Params params_from_binary(std::string_view bytes) {
    Reader r(bytes);
    char magic[sizeof kMagic];
    r.take(magic, sizeof magic);
    if (std::memcmp(magic, kMagic, sizeof kMagic) != 0) throw DataError("params binary: bad magic");
    const auto count = r.u64();
    Params out;
    for (std::uint64_t i = 0; i < count; ++i) {
        const auto len = r.u64();
        if (len > r.remaining()) throw DataError("params binary: truncated layer id");
        std::string id(len, '\0');
        r.take(id.data(), len);
        Tensor w = r.tensor();
        Tensor b = r.tensor();
        out.layers.push_back({std::move(id), std::move(w), std::move(b)});
    }
    if (!r.done()) throw DataError("params binary: trailing bytes");
    return out;
}

} // namespace weekcast::nn
