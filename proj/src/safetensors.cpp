#include "newsframe/safetensors.hpp"

#include <cstring>
#include <fstream>

#include <nlohmann/json.hpp>

#include "newsframe/errors.hpp"

namespace newsframe::safetensors {

namespace {

struct DtypeName {
    torch::ScalarType type;
    const char* name;
};

constexpr DtypeName kDtypes[] = {
    {torch::kFloat32, "F32"}, {torch::kFloat64, "F64"}, {torch::kFloat16, "F16"}, {torch::kBFloat16, "BF16"},
    {torch::kInt64, "I64"},   {torch::kInt32, "I32"},   {torch::kInt8, "I8"},     {torch::kUInt8, "U8"},
    {torch::kBool, "BOOL"},
};

torch::ScalarType dtype_from(const std::string& name) {
    for (const auto& d : kDtypes) {
        if (name == d.name) return d.type;
    }
    throw DataError("unsupported safetensors dtype " + name);
}

const char* dtype_name(torch::ScalarType t) {
    for (const auto& d : kDtypes) {
        if (d.type == t) return d.name;
    }
    throw DataError(std::string("cannot serialise tensors of type ") + c10::toString(t));
}

}  // namespace

TensorMap load(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open " + path.string());
    std::uint64_t header_len = 0;
    unsigned char len_bytes[8];
    if (!in.read(reinterpret_cast<char*>(len_bytes), 8)) throw DataError(path.string() + " is truncated");
    for (int i = 7; i >= 0; --i) header_len = (header_len << 8) | len_bytes[i];
    const auto file_size = std::filesystem::file_size(path);
    if (header_len > file_size - 8) throw DataError(path.string() + " has a corrupt header length");
    std::string header(header_len, '\0');
    in.read(header.data(), static_cast<std::streamsize>(header_len));
    nlohmann::json meta;
    try {
        meta = nlohmann::json::parse(header);
    } catch (const nlohmann::json::parse_error& e) {
        throw DataError(path.string() + ": bad safetensors header: " + e.what());
    }
    const std::uint64_t data_start = 8 + header_len;
    const std::uint64_t data_size = file_size - data_start;
    std::vector<char> data(data_size);
    in.read(data.data(), static_cast<std::streamsize>(data_size));
    if (!in) throw DataError(path.string() + " is truncated");

    TensorMap out;
    for (const auto& [name, info] : meta.items()) {
        if (name == "__metadata__") continue;
        const auto type = dtype_from(info.at("dtype").get<std::string>());
        std::vector<std::int64_t> shape = info.at("shape").get<std::vector<std::int64_t>>();
        const auto offsets = info.at("data_offsets").get<std::vector<std::uint64_t>>();
        if (offsets.size() != 2 || offsets[0] > offsets[1] || offsets[1] > data_size) {
            throw DataError(path.string() + ": tensor " + name + " has bad offsets");
        }
        auto t = torch::empty(shape, torch::TensorOptions().dtype(type));
        const auto nbytes = static_cast<std::uint64_t>(t.nbytes());
        if (nbytes != offsets[1] - offsets[0]) {
            throw DataError(path.string() + ": tensor " + name + " size does not match its shape");
        }
        std::memcpy(t.data_ptr(), data.data() + offsets[0], nbytes);
        if (type == torch::kFloat16 || type == torch::kBFloat16) t = t.to(torch::kFloat32);
        out.emplace(name, std::move(t));
    }
    return out;
}

void save(const std::filesystem::path& path, const TensorMap& tensors,
          const std::map<std::string, std::string>& metadata) {
    nlohmann::json header = nlohmann::json::object();
    if (!metadata.empty()) header["__metadata__"] = metadata;
    std::vector<torch::Tensor> blobs;
    std::uint64_t offset = 0;
    for (const auto& [name, tensor] : tensors) {
        auto t = tensor.detach().to(torch::kCPU).contiguous();
        const auto nbytes = static_cast<std::uint64_t>(t.nbytes());
        header[name] = {{"dtype", dtype_name(t.scalar_type())},
                        {"shape", t.sizes().vec()},
                        {"data_offsets", {offset, offset + nbytes}}};
        offset += nbytes;
        blobs.push_back(std::move(t));
    }
    std::string text = header.dump();
    while (text.size() % 8 != 0) text.push_back(' ');

    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot write " + path.string());
    const std::uint64_t len = text.size();
    for (int i = 0; i < 8; ++i) out.put(static_cast<char>((len >> (8 * i)) & 0xFF));
    out.write(text.data(), static_cast<std::streamsize>(text.size()));
    for (const auto& t : blobs) {
        out.write(static_cast<const char*>(t.data_ptr()), static_cast<std::streamsize>(t.nbytes()));
    }
    if (!out) throw DataError("failed writing " + path.string());
}

}  // namespace newsframe::safetensors
