#pragma once

#include <filesystem>
#include <memory>

#include "spinr/aperture.hpp"
#include "spinr/dataset.hpp"
#include "spinr/phantom.hpp"
#include "spinr/scene_field.hpp"
#include "spinr/volume.hpp"

namespace spinr {

// Volume container: magic "SPVL", u32 version, u64 JSON-header length, JSON
// header {origin, voxel_size, dims}, then f32 intensities x-fastest.
void write_volume(const std::filesystem::path& path, const Volume& vol);
Volume read_volume(const std::filesystem::path& path);

// Self-describing field checkpoint: magic "SPCK", u32 version, u64 JSON
// header length, JSON header (field type plus geometry/architecture), then
// raw f64 parameters.
void save_field(const std::filesystem::path& path, const SceneField& field);
std::unique_ptr<SceneField> load_field(const std::filesystem::path& path);

// JSON config files for the CLI.
ChirpConfig load_chirp_config(const std::filesystem::path& path);
CylindricalApertureSpec load_aperture_spec(const std::filesystem::path& path);
void save_aperture_spec(const std::filesystem::path& path, const CylindricalApertureSpec& spec);
PhantomSpec load_phantom_spec(const std::filesystem::path& path);

}  // namespace spinr
