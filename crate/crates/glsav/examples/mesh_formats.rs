//! Generate the two computational domains, inspect their structure, and
//! round-trip the plain-text mesh format so externally generated meshes can
//! be plugged in (`preset = custom` + `mesh_file = <path>` in a config).
//!
//!     cargo run --example mesh_formats

use glsav::mesh::{build_dof_map, multiconnected_mesh, unit_square_mesh, Mesh};

fn describe(name: &str, mesh: &Mesh) {
    let p2 = build_dof_map(mesh, 2).unwrap();
    println!(
        "{name}: {} vertices, {} triangles, {} boundary edges in {} loop(s)",
        mesh.n_vertices(),
        mesh.n_triangles(),
        mesh.boundary_edges.len(),
        mesh.boundary_loop_count()
    );
    println!(
        "  area = {:.12}, h = {:.6}, P2 dofs = {} ({} edges)",
        mesh.total_area(),
        mesh.mesh_size(),
        p2.n_dofs,
        p2.n_edges
    );
}

fn main() {
    let square = unit_square_mesh(8).unwrap();
    describe("unit square (n = 8)", &square);
    let multi = multiconnected_mesh(12).unwrap();
    describe("multiconnected (n = 12)", &multi);

    let dir = std::env::temp_dir().join("glsav_meshes");
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("multiconnected_12.txt");
    multi.write_file(&path).unwrap();
    let reloaded = Mesh::read_file(&path).unwrap();
    assert_eq!(reloaded.vertices, multi.vertices);
    assert_eq!(reloaded.triangles, multi.triangles);
    println!("\nwrote and reloaded {} ({} bytes)", path.display(), std::fs::metadata(&path).unwrap().len());
    println!("file header: {}", multi.to_text().lines().next().unwrap());
}
