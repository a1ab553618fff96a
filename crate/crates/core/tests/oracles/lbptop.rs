//! LBP-TOP by direct nested loops over every voxel and plane.

/// Number of 0/1 changes around the circular 8-bit string.
fn transitions(code: u32) -> u32 {
    (0..8)
        .filter(|&i| ((code >> i) & 1) != ((code >> ((i + 1) % 8)) & 1))
        .count() as u32
}

pub fn lbptop_histogram(v: &[u8], h: usize, w: usize, t: usize) -> Vec<f64> {
    let uniform: Vec<u32> = (0..256).filter(|&c| transitions(c) <= 2).collect();
    assert_eq!(uniform.len(), 58);
    let bin = |c: u32| uniform.iter().position(|&u| u == c).unwrap_or(58);
    let at = |z: usize, y: usize, x: usize| v[z * h * w + y * w + x];
    // Circle of (row, col) steps, clockwise from the top-left corner.
    let ring = [
        (-1i64, -1i64),
        (-1, 0),
        (-1, 1),
        (0, 1),
        (1, 1),
        (1, 0),
        (1, -1),
        (0, -1),
    ];
    let mut hist = vec![0.0; 177];
    let mut count = 0.0;
    for z in 1..t - 1 {
        for y in 1..h - 1 {
            for x in 1..w - 1 {
                count += 1.0;
                let c = at(z, y, x);
                for plane in 0..3 {
                    let mut code = 0u32;
                    for (i, &(dr, dc)) in ring.iter().enumerate() {
                        let (zz, yy, xx) = match plane {
                            0 => (z as i64, y as i64 + dr, x as i64 + dc),
                            1 => (z as i64 + dr, y as i64, x as i64 + dc),
                            _ => (z as i64 + dr, y as i64 + dc, x as i64),
                        };
                        if at(zz as usize, yy as usize, xx as usize) >= c {
                            code += 1 << i;
                        }
                    }
                    hist[plane * 59 + bin(code)] += 1.0;
                }
            }
        }
    }
    hist.iter().map(|c| c / count).collect()
}
