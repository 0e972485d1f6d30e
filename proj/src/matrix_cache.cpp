#include <bit>
#include <cstring>
#include <fstream>

#include <json.hpp>

#include "buildtime/dataset.hpp"
#include "buildtime/error.hpp"
#include "buildtime/hash.hpp"

namespace buildtime {

namespace {

constexpr char kMagic[4] = {'B', 'T', 'F', 'M'};
constexpr std::uint32_t kVersion = 1;

static_assert(std::endian::native == std::endian::little, "matrix cache assumes a little-endian host");

template <typename T>
void write_pod(std::ostream& out, const T& value)
{
    out.write(reinterpret_cast<const char*>(&value), sizeof value);
}

template <typename T>
T read_pod(std::istream& in, const std::string& source)
{
    T value{};
    if (!in.read(reinterpret_cast<char*>(&value), sizeof value)) {
        throw IoError(source + ": truncated matrix cache");
    }
    return value;
}

} // namespace

void save_matrix(const std::filesystem::path& path, const FeatureMatrix& matrix)
{
    matrix.validate();
    nlohmann::json header;
    header["rows"] = matrix.rows();
    header["cols"] = matrix.cols();
    header["column_names"] = matrix.column_names;
    header["response_name"] = matrix.response_name;
    header["imputation"] = matrix.imputation;
    header["provenance"] = matrix.provenance;
    const std::string text = header.dump();

    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw IoError("cannot write " + path.string());
    }
    out.write(kMagic, sizeof kMagic);
    write_pod(out, kVersion);
    write_pod(out, static_cast<std::uint64_t>(text.size()));
    out.write(text.data(), static_cast<std::streamsize>(text.size()));
    // Column-major payload, then the response.
    out.write(reinterpret_cast<const char*>(matrix.values.data()),
              static_cast<std::streamsize>(sizeof(double) * static_cast<std::size_t>(matrix.values.size())));
    out.write(reinterpret_cast<const char*>(matrix.response.data()),
              static_cast<std::streamsize>(sizeof(double) * static_cast<std::size_t>(matrix.response.size())));
    if (!out) {
        throw IoError("failed writing " + path.string());
    }
}

FeatureMatrix load_matrix(const std::filesystem::path& path)
{
    const std::string source = path.string();
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IoError("cannot open " + source);
    }
    char magic[4];
    if (!in.read(magic, sizeof magic) || std::memcmp(magic, kMagic, sizeof kMagic) != 0) {
        throw IoError(source + ": not a matrix cache");
    }
    const auto version = read_pod<std::uint32_t>(in, source);
    if (version != kVersion) {
        throw IoError(source + ": unsupported matrix cache version " + std::to_string(version));
    }
    const auto length = read_pod<std::uint64_t>(in, source);
    std::string text(length, '\0');
    if (!in.read(text.data(), static_cast<std::streamsize>(length))) {
        throw IoError(source + ": truncated header");
    }

    FeatureMatrix matrix;
    try {
        const auto header = nlohmann::json::parse(text);
        const auto rows = header.at("rows").get<Index>();
        const auto cols = header.at("cols").get<Index>();
        matrix.column_names = header.at("column_names").get<std::vector<std::string>>();
        matrix.response_name = header.at("response_name").get<std::string>();
        matrix.imputation = header.at("imputation").get<std::vector<double>>();
        matrix.provenance = header.at("provenance").get<std::map<std::string, std::string>>();
        matrix.values.resize(rows, cols);
        matrix.response.resize(rows);
    } catch (const nlohmann::json::exception& e) {
        throw IoError(source + ": bad header: " + e.what());
    }
    if (!in.read(reinterpret_cast<char*>(matrix.values.data()),
                 static_cast<std::streamsize>(sizeof(double) * static_cast<std::size_t>(matrix.values.size()))) ||
        !in.read(reinterpret_cast<char*>(matrix.response.data()),
                 static_cast<std::streamsize>(sizeof(double) * static_cast<std::size_t>(matrix.response.size())))) {
        throw IoError(source + ": truncated payload");
    }
    matrix.validate();
    return matrix;
}

std::uint64_t fingerprint(const FeatureMatrix& matrix)
{
    Fnv1a h;
    for (const auto& name : matrix.column_names) {
        h.update(name);
    }
    h.update(matrix.values.data(), sizeof(double) * static_cast<std::size_t>(matrix.values.size()));
    h.update(matrix.response.data(), sizeof(double) * static_cast<std::size_t>(matrix.response.size()));
    return h.digest();
}

} // namespace buildtime
