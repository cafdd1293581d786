#include "spinr/io.hpp"

#include <cstring>
#include <fstream>

#include "json.hpp"

namespace spinr {

using nlohmann::json;

namespace {

// All containers share the envelope: 4-byte magic, u32 version, u64 JSON
// header length, header bytes, payload. Little-endian throughout.

constexpr std::uint32_t kFormatVersion = 1;

void write_bytes(std::ofstream& out, const void* data, std::size_t size) {
    out.write(static_cast<const char*>(data), static_cast<std::streamsize>(size));
    if (!out) throw FormatError(FormatError::Kind::IoFailure, "io: write failed");
}

void read_bytes(std::ifstream& in, void* data, std::size_t size, const char* what) {
    in.read(static_cast<char*>(data), static_cast<std::streamsize>(size));
    if (static_cast<std::size_t>(in.gcount()) != size)
        throw FormatError(FormatError::Kind::Truncated,
                          std::string("io: truncated file while reading ") + what);
}

void write_envelope(std::ofstream& out, const char magic[4], const json& header) {
    write_bytes(out, magic, 4);
    const std::uint32_t version = kFormatVersion;
    write_bytes(out, &version, sizeof(version));
    const std::string text = header.dump();
    const std::uint64_t len = text.size();
    write_bytes(out, &len, sizeof(len));
    write_bytes(out, text.data(), text.size());
}

json read_envelope(std::ifstream& in, const char expect_magic[4]) {
    char magic[4];
    read_bytes(in, magic, 4, "magic");
    if (std::memcmp(magic, expect_magic, 4) != 0)
        throw FormatError(FormatError::Kind::BadMagic, "io: bad magic");
    std::uint32_t version = 0;
    read_bytes(in, &version, sizeof(version), "version");
    if (version != kFormatVersion)
        throw FormatError(FormatError::Kind::BadVersion,
                          "io: unsupported format version " + std::to_string(version));
    std::uint64_t len = 0;
    read_bytes(in, &len, sizeof(len), "header length");
    std::string text(len, '\0');
    read_bytes(in, text.data(), len, "header");
    json header = json::parse(text, nullptr, false);
    if (header.is_discarded())
        throw FormatError(FormatError::Kind::BadHeader, "io: header is not valid JSON");
    return header;
}

std::ofstream open_out(const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw FormatError(FormatError::Kind::IoFailure, "io: cannot open for writing: " + path.string());
    return out;
}

std::ifstream open_in(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw FormatError(FormatError::Kind::IoFailure, "io: cannot open for reading: " + path.string());
    return in;
}

json vec_to_json(const Vec3& v) { return json::array({v.x, v.y, v.z}); }

Vec3 vec_from_json(const json& j) {
    if (!j.is_array() || j.size() != 3)
        throw FormatError(FormatError::Kind::BadHeader, "io: expected 3-vector");
    return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
}

json bounds_to_json(const SceneBounds& b) {
    return json{{"min", vec_to_json(b.min_corner)}, {"max", vec_to_json(b.max_corner)}};
}

SceneBounds bounds_from_json(const json& j) {
    return SceneBounds(vec_from_json(j.at("min")), vec_from_json(j.at("max")));
}

json chirp_to_json(const ChirpConfig& c) {
    return json{{"f0", c.f0},
                {"slope", c.slope},
                {"sample_rate", c.sample_rate},
                {"num_samples", c.num_samples},
                {"c", c.c}};
}

ChirpConfig chirp_from_json(const json& j) {
    return ChirpConfig(j.value("f0", 0.0), j.at("slope").get<double>(),
                       j.at("sample_rate").get<double>(), j.at("num_samples").get<std::size_t>(),
                       j.value("c", kSpeedOfLight));
}

template <typename T>
void write_complex_payload(std::ofstream& out, const std::vector<std::complex<double>>& values) {
    std::vector<T> buf(values.size() * 2);
    for (std::size_t i = 0; i < values.size(); ++i) {
        buf[2 * i] = static_cast<T>(values[i].real());
        buf[2 * i + 1] = static_cast<T>(values[i].imag());
    }
    write_bytes(out, buf.data(), buf.size() * sizeof(T));
}

template <typename T>
std::vector<std::complex<double>> read_complex_payload(std::ifstream& in, std::size_t count,
                                                       const char* what) {
    std::vector<T> buf(count * 2);
    read_bytes(in, buf.data(), buf.size() * sizeof(T), what);
    std::vector<std::complex<double>> values(count);
    for (std::size_t i = 0; i < count; ++i) {
        values[i] = {static_cast<double>(buf[2 * i]), static_cast<double>(buf[2 * i + 1])};
    }
    return values;
}

}  // namespace

void write_dataset(const std::filesystem::path& path, const MeasurementSet& set,
                   bool f64_payload) {
    set.validate();
    auto out = open_out(path);
    json header{{"chirp", chirp_to_json(set.chirp)},
                {"window",
                 {{"k_min", set.window.k_min}, {"k_max", set.window.k_max}, {"guard", set.window.guard}}},
                {"bounds", bounds_to_json(set.bounds)},
                {"pose_count", set.poses.size()},
                {"f64_payload", f64_payload},
                {"has_full_spectrum", set.has_full_spectrum()},
                {"mono_converted", set.mono_converted},
                {"noise_sigma", set.noise_sigma},
                {"seed", set.seed}};
    write_envelope(out, "SPNR", header);
    std::vector<double> pose_buf(set.poses.size() * 6);
    for (std::size_t i = 0; i < set.poses.size(); ++i) {
        const SensorPose& p = set.poses[i];
        double* d = pose_buf.data() + 6 * i;
        d[0] = p.tx.x; d[1] = p.tx.y; d[2] = p.tx.z;
        d[3] = p.rx.x; d[4] = p.rx.y; d[5] = p.rx.z;
    }
    write_bytes(out, pose_buf.data(), pose_buf.size() * sizeof(double));
    if (f64_payload) {
        write_complex_payload<double>(out, set.values);
        if (set.has_full_spectrum()) write_complex_payload<double>(out, set.full_spectrum);
    } else {
        write_complex_payload<float>(out, set.values);
        if (set.has_full_spectrum()) write_complex_payload<float>(out, set.full_spectrum);
    }
}

MeasurementSet read_dataset(const std::filesystem::path& path) {
    auto in = open_in(path);
    const json header = read_envelope(in, "SPNR");
    MeasurementSet set;
    try {
        set.chirp = chirp_from_json(header.at("chirp"));
        const json& w = header.at("window");
        set.window = BinWindow(w.at("k_min").get<int>(), w.at("k_max").get<int>(),
                               w.value("guard", 0));
        set.bounds = bounds_from_json(header.at("bounds"));
        set.mono_converted = header.value("mono_converted", false);
        set.noise_sigma = header.value("noise_sigma", 0.0);
        set.seed = header.value("seed", std::uint64_t{0});
    } catch (const json::exception& e) {
        throw FormatError(FormatError::Kind::BadHeader,
                          std::string("io: dataset header missing fields: ") + e.what());
    }
    const std::size_t pose_count = header.at("pose_count").get<std::size_t>();
    const bool f64_payload = header.value("f64_payload", false);
    const bool has_full = header.value("has_full_spectrum", false);

    std::vector<double> pose_buf(pose_count * 6);
    read_bytes(in, pose_buf.data(), pose_buf.size() * sizeof(double), "poses");
    set.poses.resize(pose_count);
    for (std::size_t i = 0; i < pose_count; ++i) {
        const double* d = pose_buf.data() + 6 * i;
        set.poses[i] = {{d[0], d[1], d[2]}, {d[3], d[4], d[5]}};
    }
    const std::size_t n_window = pose_count * set.window.width();
    const std::size_t n_full = has_full ? pose_count * set.chirp.num_samples : 0;
    if (f64_payload) {
        set.values = read_complex_payload<double>(in, n_window, "window values");
        if (has_full) set.full_spectrum = read_complex_payload<double>(in, n_full, "full spectrum");
    } else {
        set.values = read_complex_payload<float>(in, n_window, "window values");
        if (has_full) set.full_spectrum = read_complex_payload<float>(in, n_full, "full spectrum");
    }
    set.validate();
    return set;
}

void write_volume(const std::filesystem::path& path, const Volume& vol) {
    auto out = open_out(path);
    json header{{"origin", vec_to_json(vol.origin)},
                {"voxel_size", vol.voxel_size},
                {"dims", json::array({vol.dims[0], vol.dims[1], vol.dims[2]})}};
    write_envelope(out, "SPVL", header);
    std::vector<float> buf(vol.intensities.size());
    for (std::size_t i = 0; i < buf.size(); ++i) buf[i] = static_cast<float>(vol.intensities[i]);
    write_bytes(out, buf.data(), buf.size() * sizeof(float));
}

Volume read_volume(const std::filesystem::path& path) {
    auto in = open_in(path);
    const json header = read_envelope(in, "SPVL");
    Volume vol;
    try {
        vol.origin = vec_from_json(header.at("origin"));
        vol.voxel_size = header.at("voxel_size").get<double>();
        const json& d = header.at("dims");
        vol.dims = {d[0].get<std::size_t>(), d[1].get<std::size_t>(), d[2].get<std::size_t>()};
    } catch (const json::exception& e) {
        throw FormatError(FormatError::Kind::BadHeader,
                          std::string("io: volume header missing fields: ") + e.what());
    }
    std::vector<float> buf(vol.cell_count());
    read_bytes(in, buf.data(), buf.size() * sizeof(float), "intensities");
    vol.intensities.assign(buf.begin(), buf.end());
    return vol;
}

void save_field(const std::filesystem::path& path, const SceneField& field) {
    auto out = open_out(path);
    json header;
    if (const auto* grid = dynamic_cast<const VoxelGridField*>(&field)) {
        header = json{{"type", "grid"},
                      {"origin", vec_to_json(grid->origin())},
                      {"voxel_size", grid->voxel_size()},
                      {"dims", json::array({grid->dims()[0], grid->dims()[1], grid->dims()[2]})},
                      {"activation",
                       grid->activation() == OutputActivation::Softplus ? "softplus" : "identity"}};
    } else if (const auto* net = dynamic_cast<const CoordinateNetworkField*>(&field)) {
        header = json{{"type", "net"},
                      {"bounds", bounds_to_json(net->bounds())},
                      {"hidden", net->hidden_widths()},
                      {"omega0", net->omega0()}};
    } else {
        throw std::invalid_argument("save_field: unknown field type");
    }
    write_envelope(out, "SPCK", header);
    const auto params = field.params();
    write_bytes(out, params.data(), params.size() * sizeof(double));
}

std::unique_ptr<SceneField> load_field(const std::filesystem::path& path) {
    auto in = open_in(path);
    const json header = read_envelope(in, "SPCK");
    std::unique_ptr<SceneField> field;
    try {
        const std::string type = header.at("type").get<std::string>();
        if (type == "grid") {
            const json& d = header.at("dims");
            const OutputActivation act = header.at("activation").get<std::string>() == "softplus"
                                             ? OutputActivation::Softplus
                                             : OutputActivation::Identity;
            field = std::make_unique<VoxelGridField>(
                vec_from_json(header.at("origin")), header.at("voxel_size").get<double>(),
                std::array<std::size_t, 3>{d[0].get<std::size_t>(), d[1].get<std::size_t>(),
                                           d[2].get<std::size_t>()},
                act);
        } else if (type == "net") {
            field = std::make_unique<CoordinateNetworkField>(
                bounds_from_json(header.at("bounds")),
                header.at("hidden").get<std::vector<std::size_t>>(),
                header.at("omega0").get<double>());
        } else {
            throw FormatError(FormatError::Kind::BadHeader, "io: unknown field type " + type);
        }
    } catch (const json::exception& e) {
        throw FormatError(FormatError::Kind::BadHeader,
                          std::string("io: checkpoint header missing fields: ") + e.what());
    }
    auto params = field->params();
    read_bytes(in, params.data(), params.size() * sizeof(double), "parameters");
    return field;
}

ChirpConfig load_chirp_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw FormatError(FormatError::Kind::IoFailure, "io: cannot open " + path.string());
    json j = json::parse(in, nullptr, false);
    if (j.is_discarded())
        throw FormatError(FormatError::Kind::BadHeader, "io: invalid JSON in " + path.string());
    return chirp_from_json(j);
}

CylindricalApertureSpec load_aperture_spec(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw FormatError(FormatError::Kind::IoFailure, "io: cannot open " + path.string());
    json j = json::parse(in, nullptr, false);
    if (j.is_discarded())
        throw FormatError(FormatError::Kind::BadHeader, "io: invalid JSON in " + path.string());
    CylindricalApertureSpec spec;
    try {
        spec.radius = j.at("radius").get<double>();
        spec.z_min = j.at("z_min").get<double>();
        spec.z_max = j.at("z_max").get<double>();
        spec.n_z = j.at("n_z").get<std::size_t>();
        spec.n_theta = j.at("n_theta").get<std::size_t>();
        if (j.contains("center")) spec.center = vec_from_json(j["center"]);
        auto read_offsets = [&](const char* key, std::vector<Vec3>& dst) {
            if (!j.contains(key)) return;
            dst.clear();
            for (const auto& o : j[key]) dst.push_back(vec_from_json(o));
        };
        read_offsets("tx_offsets", spec.tx_offsets);
        read_offsets("rx_offsets", spec.rx_offsets);
    } catch (const json::exception& e) {
        throw FormatError(FormatError::Kind::BadHeader,
                          std::string("io: aperture config missing fields: ") + e.what());
    }
    spec.validate();
    return spec;
}

void save_aperture_spec(const std::filesystem::path& path, const CylindricalApertureSpec& spec) {
    spec.validate();
    json offsets_tx = json::array();
    for (const auto& o : spec.tx_offsets) offsets_tx.push_back(vec_to_json(o));
    json offsets_rx = json::array();
    for (const auto& o : spec.rx_offsets) offsets_rx.push_back(vec_to_json(o));
    const json j{{"radius", spec.radius}, {"z_min", spec.z_min},   {"z_max", spec.z_max},
                 {"n_z", spec.n_z},       {"n_theta", spec.n_theta}, {"center", vec_to_json(spec.center)},
                 {"tx_offsets", offsets_tx}, {"rx_offsets", offsets_rx}};
    std::ofstream out(path);
    if (!out) throw FormatError(FormatError::Kind::IoFailure, "io: cannot open " + path.string());
    out << j.dump(2) << "\n";
}

PhantomSpec load_phantom_spec(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw FormatError(FormatError::Kind::IoFailure, "io: cannot open " + path.string());
    json j = json::parse(in, nullptr, false);
    if (j.is_discarded())
        throw FormatError(FormatError::Kind::BadHeader, "io: invalid JSON in " + path.string());
    PhantomSpec spec;
    try {
        spec.bounds = bounds_from_json(j.at("bounds"));
        for (const auto& p : j.at("primitives")) {
            const std::string type = p.at("type").get<std::string>();
            if (type == "point") {
                spec.primitives.push_back(PhantomSpec::Point{vec_from_json(p.at("position")),
                                                             p.value("sigma", 1.0)});
            } else if (type == "sphere_shell") {
                spec.primitives.push_back(PhantomSpec::SphereShell{
                    vec_from_json(p.at("center")), p.at("radius").get<double>(),
                    p.value("sigma", 1.0), p.at("count").get<std::size_t>()});
            } else if (type == "box_shell") {
                spec.primitives.push_back(PhantomSpec::BoxShell{
                    vec_from_json(p.at("min")), vec_from_json(p.at("max")), p.value("sigma", 1.0),
                    p.at("count").get<std::size_t>()});
            } else if (type == "obj_vertices") {
                spec.primitives.push_back(PhantomSpec::ObjVertices{
                    p.at("path").get<std::string>(), p.value("sigma", 1.0),
                    p.value("max_points", std::size_t{0})});
            } else {
                throw FormatError(FormatError::Kind::BadHeader,
                                  "io: unknown phantom primitive type " + type);
            }
        }
    } catch (const json::exception& e) {
        throw FormatError(FormatError::Kind::BadHeader,
                          std::string("io: phantom config missing fields: ") + e.what());
    }
    return spec;
}

}  // namespace spinr
