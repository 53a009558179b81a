fn main() {
    lindblad_algebra::cli::main();
}
