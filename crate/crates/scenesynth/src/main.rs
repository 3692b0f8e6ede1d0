fn main() {
    std::process::exit(scenesynth::cli::run());
}
